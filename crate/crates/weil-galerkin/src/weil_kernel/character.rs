//! Character data attached to a cutoff: either the Riemann zeta setting
//! (trivial weights, pole term enabled) or a primitive Dirichlet character
//! (root-of-unity weights on prime powers, shifted archimedean parameter,
//! no pole term).

use crate::error::{Error, Result};
use crate::mpkit::Ctx;
use rug::{Float, Rational};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CharacterKind {
    Zeta,
    Dirichlet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// A root of unity `e^{2πi·num/den}` stored as an exact fraction of a full
/// turn, reduced with `0 ≤ num < den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Turn {
    num: u32,
    den: u32,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Turn {
    pub fn new(num: u64, den: u64) -> Result<Turn> {
        if den == 0 {
            return Err(Error::config("turn denominator must be nonzero"));
        }
        let num = num % den;
        if num == 0 {
            return Ok(Turn { num: 0, den: 1 });
        }
        let g = gcd(num, den);
        let (num, den) = (num / g, den / g);
        if num > u32::MAX as u64 || den > u32::MAX as u64 {
            return Err(Error::config("turn fraction out of range"));
        }
        Ok(Turn {
            num: num as u32,
            den: den as u32,
        })
    }

    pub fn one() -> Turn {
        Turn { num: 0, den: 1 }
    }

    pub fn minus_one() -> Turn {
        Turn { num: 1, den: 2 }
    }

    /// Product of the two roots of unity (turn angles add modulo 1).
    pub fn mul(self, other: Turn) -> Turn {
        let den = (self.den as u64) * (other.den as u64);
        let num = (self.num as u64) * (other.den as u64) + (other.num as u64) * (self.den as u64);
        Turn::new(num % den, den).expect("reduced turn always fits")
    }

    /// Real part of the root of unity. Exact for the 4th-root lattice,
    /// correctly rounded otherwise.
    pub fn re(&self, ctx: &Ctx) -> Float {
        match (self.num, self.den) {
            (0, 1) => ctx.f(1u32),
            (1, 2) => ctx.f(-1i32),
            (1, 4) | (3, 4) => ctx.zero(),
            (n, d) => (ctx.pi() * 2u32 * n / d).cos(),
        }
    }
}

/// The character data of a cutoff specification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterSpec {
    kind: CharacterKind,
    modulus: u32,
    /// Residue r mod q → χ(r): `None` encodes 0 (shared divisor), `Some`
    /// the root of unity.
    values: Vec<Option<Turn>>,
    parity: Parity,
    /// Archimedean parameter: 1/4 (even) or 3/4 (odd).
    arch_param: Rational,
}

impl CharacterSpec {
    /// The Riemann zeta setting: trivial weights, pole term enabled.
    pub fn zeta() -> CharacterSpec {
        CharacterSpec {
            kind: CharacterKind::Zeta,
            modulus: 1,
            values: vec![Some(Turn::one())],
            parity: Parity::Even,
            arch_param: Rational::from((1, 4)),
        }
    }

    /// The quadratic character mod 3 (odd): χ(1) = 1, χ(2) = -1.
    pub fn chi3() -> CharacterSpec {
        CharacterSpec::dirichlet(3, vec![None, Some(Turn::one()), Some(Turn::minus_one())])
            .expect("chi3 is a valid character")
    }

    /// A Dirichlet character from its residue table; the parity and
    /// archimedean parameter are derived from χ(-1).
    pub fn dirichlet(modulus: u32, values: Vec<Option<Turn>>) -> Result<CharacterSpec> {
        if modulus == 0 {
            return Err(Error::config("character modulus must be positive"));
        }
        if values.len() != modulus as usize {
            return Err(Error::config(format!(
                "character value table has {} entries for modulus {}",
                values.len(),
                modulus
            )));
        }
        let q = modulus as u64;
        for (r, v) in values.iter().enumerate() {
            let shares = gcd(r as u64, q) > 1 || (q > 1 && r == 0);
            if shares != v.is_none() {
                return Err(Error::config(format!(
                    "character value at residue {r} must be zero exactly when \
                     gcd({r}, {modulus}) > 1"
                )));
            }
        }
        for r in 0..q {
            for s in 0..q {
                let lhs = match (values[r as usize], values[s as usize]) {
                    (Some(a), Some(b)) => Some(a.mul(b)),
                    _ => None,
                };
                let rhs = values[((r * s) % q) as usize];
                if lhs != rhs {
                    return Err(Error::config(format!(
                        "character is not completely multiplicative at ({r}, {s})"
                    )));
                }
            }
        }
        let at_minus_one = values[((q - 1) % q) as usize].ok_or_else(|| {
            Error::config("character must be nonzero at -1")
        })?;
        let parity = if at_minus_one == Turn::one() {
            Parity::Even
        } else if at_minus_one == Turn::minus_one() {
            Parity::Odd
        } else {
            return Err(Error::config(
                "character value at -1 must be ±1",
            ));
        };
        let arch_param = match parity {
            Parity::Even => Rational::from((1, 4)),
            Parity::Odd => Rational::from((3, 4)),
        };
        Ok(CharacterSpec {
            kind: CharacterKind::Dirichlet,
            modulus,
            values,
            parity,
            arch_param,
        })
    }

    pub fn kind(&self) -> CharacterKind {
        self.kind
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn arch_param(&self) -> &Rational {
        &self.arch_param
    }

    /// Whether the pole term of the completed zeta function applies.
    pub fn pole_enabled(&self) -> bool {
        self.kind == CharacterKind::Zeta
    }

    /// χ(n) as a root of unity, or `None` for 0.
    pub fn value(&self, n: u64) -> Option<Turn> {
        self.values[(n % self.modulus as u64) as usize]
    }

    /// Re χ(n) at working precision.
    pub fn re_value(&self, n: u64, ctx: &Ctx) -> Float {
        match self.value(n) {
            None => ctx.zero(),
            Some(t) => t.re(ctx),
        }
    }

    /// Stable hex digest of the full character data.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(match self.kind {
            CharacterKind::Zeta => b"zeta:",
            CharacterKind::Dirichlet => b"diri:",
        });
        h.update(self.modulus.to_le_bytes());
        for v in &self.values {
            match v {
                None => h.update([0xffu8; 8]),
                Some(t) => {
                    h.update(t.num.to_le_bytes());
                    h.update(t.den.to_le_bytes());
                }
            }
        }
        h.update(match self.parity {
            Parity::Even => b"e",
            Parity::Odd => b"o",
        });
        format!("{:x}", h.finalize())
    }
}
