//! Exact calculus on Gaussian-polynomial expressions.
//!
//! An expression is a finite sum of terms `c * r^a * z^b * exp(-sr*r^2 - sz*z^2)`.
//! This family is closed under addition, multiplication, differentiation in
//! `r` and `z`, and division by powers of `r`, which is enough to write down
//! every analytic field and differential operator the test suites need.
//! Powers are integers, so differentiation is exact coefficient bookkeeping
//! rather than numerics.

/// One term `c * r^a * z^b * exp(-sr*r^2 - sz*z^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub c: f64,
    pub a: i32,
    pub b: i32,
    pub sr: f64,
    pub sz: f64,
}

/// Sum of Gaussian-polynomial terms.
#[derive(Debug, Clone, Default)]
pub struct GaussPoly {
    terms: Vec<Term>,
}

impl GaussPoly {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    /// Single term `c * r^a * z^b * exp(-s*(r^2+z^2))`.
    pub fn term(c: f64, a: i32, b: i32, s: f64) -> Self {
        Self::term_sep(c, a, b, s, s)
    }

    /// Single term with independent radial and axial Gaussian rates.
    pub fn term_sep(c: f64, a: i32, b: i32, sr: f64, sz: f64) -> Self {
        Self {
            terms: vec![Term { c, a, b, sr, sz }],
        }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Self { terms }.cleaned()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, k: f64) -> Self {
        Self {
            terms: self.terms.iter().map(|t| Term { c: k * t.c, ..*t }).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for u in &self.terms {
            for v in &other.terms {
                terms.push(Term {
                    c: u.c * v.c,
                    a: u.a + v.a,
                    b: u.b + v.b,
                    sr: u.sr + v.sr,
                    sz: u.sz + v.sz,
                });
            }
        }
        Self { terms }.cleaned()
    }

    /// d/dr, term-wise: `a r^(a-1) - 2 sr r^(a+1)` times the rest.
    pub fn ddr(&self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * 2);
        for t in &self.terms {
            if t.a != 0 {
                terms.push(Term {
                    c: t.c * f64::from(t.a),
                    a: t.a - 1,
                    ..*t
                });
            }
            if t.sr != 0.0 {
                terms.push(Term {
                    c: -2.0 * t.sr * t.c,
                    a: t.a + 1,
                    ..*t
                });
            }
        }
        Self { terms }.cleaned()
    }

    /// d/dz, term-wise.
    pub fn ddz(&self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * 2);
        for t in &self.terms {
            if t.b != 0 {
                terms.push(Term {
                    c: t.c * f64::from(t.b),
                    b: t.b - 1,
                    ..*t
                });
            }
            if t.sz != 0.0 {
                terms.push(Term {
                    c: -2.0 * t.sz * t.c,
                    b: t.b + 1,
                    ..*t
                });
            }
        }
        Self { terms }.cleaned()
    }

    /// Divide by `r^k`.
    pub fn div_r(&self, k: i32) -> Self {
        Self {
            terms: self.terms.iter().map(|t| Term { a: t.a - k, ..*t }).collect(),
        }
        .cleaned()
    }

    /// Merge like terms and drop coefficients that cancelled (exactly or to
    /// rounding). Keeps negative `r` powers only when they genuinely survive.
    fn cleaned(mut self) -> Self {
        self.terms.sort_by(|u, v| {
            (u.a, u.b, u.sr.to_bits(), u.sz.to_bits())
                .cmp(&(v.a, v.b, v.sr.to_bits(), v.sz.to_bits()))
        });
        let mut merged: Vec<Term> = Vec::with_capacity(self.terms.len());
        for t in self.terms {
            match merged.last_mut() {
                Some(m) if m.a == t.a && m.b == t.b && m.sr == t.sr && m.sz == t.sz => m.c += t.c,
                _ => merged.push(t),
            }
        }
        let scale = merged.iter().fold(0.0_f64, |acc, t| acc.max(t.c.abs()));
        let cutoff = scale * 1e-13;
        merged.retain(|t| t.c.abs() > cutoff);
        Self { terms: merged }
    }

    pub fn eval(&self, r: f64, z: f64) -> f64 {
        let mut acc = 0.0;
        for t in &self.terms {
            if r == 0.0 && t.a < 0 {
                // A surviving negative power at the axis means the expression
                // is genuinely singular there; let the caller see it.
                return f64::INFINITY * t.c.signum();
            }
            let radial = if r == 0.0 && t.a == 0 {
                1.0
            } else {
                r.powi(t.a)
            };
            acc += t.c * radial * z.powi(t.b) * (-t.sr * r * r - t.sz * z * z).exp();
        }
        acc
    }

    /// True when no term carries a negative power of `r`.
    pub fn regular_at_axis(&self) -> bool {
        self.terms.iter().all(|t| t.a >= 0)
    }

    /// Closure view, handy for quadrature oracles.
    pub fn as_fn(&self) -> impl Fn(f64, f64) -> f64 + '_ {
        move |r, z| self.eval(r, z)
    }
}

/// Cylindrical divergence of an axisymmetric meridional field:
/// `du_r/dr + u_r/r + du_z/dz`.
pub fn divergence(u_r: &GaussPoly, u_z: &GaussPoly) -> GaussPoly {
    u_r.ddr().add(&u_r.div_r(1)).add(&u_z.ddz())
}

/// Cylindrical curl components of `(u_r, u_theta, u_z)`:
/// `(-du_t/dz, du_r/dz - du_z/dr, du_t/dr + u_t/r)`.
pub fn curl(u_r: &GaussPoly, u_t: &GaussPoly, u_z: &GaussPoly) -> (GaussPoly, GaussPoly, GaussPoly) {
    let w_r = u_t.ddz().scale(-1.0);
    let w_t = u_r.ddz().sub(&u_z.ddr());
    let w_z = u_t.ddr().add(&u_t.div_r(1));
    (w_r, w_t, w_z)
}

/// `(1/r) d/dr (r df/dr) + d2f/dz2 - f/r^2` for fields vanishing on the axis.
pub fn swirl_laplacian(f: &GaussPoly) -> GaussPoly {
    let fr = f.ddr();
    fr.ddr()
        .add(&fr.div_r(1))
        .add(&f.ddz().ddz())
        .sub(&f.div_r(2))
}

/// `(1/r) d/dr (r df/dr) + d2f/dz2`.
pub fn axial_laplacian(f: &GaussPoly) -> GaussPoly {
    let fr = f.ddr();
    fr.ddr().add(&fr.div_r(1)).add(&f.ddz().ddz())
}
