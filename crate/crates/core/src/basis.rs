//! Local Pauli bases and spin configurations.
//!
//! A site basis is parametrised by `(phi, theta, alpha)`. The two basis
//! bras, written in the occupation basis `(|0>, |1>)`, are
//!
//! ```text
//! <+| = ( sin(theta/2),                  e^{i phi} cos(theta/2) )
//! <-| = ( -e^{-i alpha} cos(theta/2),    e^{-i alpha} e^{i phi} sin(theta/2) )
//! ```
//!
//! so `theta = 0` is the sigma-z basis with `+` on the occupied state.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Rotation angles of one site basis. Angles are kept as given; use
/// [`SiteAngles::canonical`] to reduce them to `[0, 2pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteAngles {
    pub phi: f64,
    pub theta: f64,
    pub alpha: f64,
}

impl SiteAngles {
    pub const Z: SiteAngles = SiteAngles { phi: 0.0, theta: 0.0, alpha: 0.0 };
    pub const X: SiteAngles = SiteAngles { phi: 0.0, theta: PI / 2.0, alpha: 0.0 };
    pub const Y: SiteAngles = SiteAngles { phi: PI / 2.0, theta: PI / 2.0, alpha: 0.0 };

    pub const fn new(phi: f64, theta: f64, alpha: f64) -> Self {
        SiteAngles { phi, theta, alpha }
    }

    pub fn canonical(self) -> Self {
        SiteAngles {
            phi: reduce_angle(self.phi),
            theta: reduce_angle(self.theta),
            alpha: reduce_angle(self.alpha),
        }
    }
}

fn reduce_angle(x: f64) -> f64 {
    let mut r = x % (2.0 * PI);
    if r < 0.0 {
        r += 2.0 * PI;
    }
    if r >= 2.0 * PI {
        0.0
    } else {
        r
    }
}

/// One basis per site.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliBasis {
    sites: Vec<SiteAngles>,
}

impl PauliBasis {
    pub fn uniform(len: usize, angles: SiteAngles) -> Self {
        PauliBasis { sites: alloc::vec![angles; len] }
    }

    pub fn per_site(sites: Vec<SiteAngles>) -> Self {
        PauliBasis { sites }
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn site(&self, j: usize) -> SiteAngles {
        self.sites[j]
    }

    pub fn sites(&self) -> &[SiteAngles] {
        &self.sites
    }

    /// The common angles if every site uses the same basis.
    pub fn as_uniform(&self) -> Option<SiteAngles> {
        let first = *self.sites.first()?;
        self.sites.iter().all(|s| *s == first).then_some(first)
    }

    pub fn canonical(&self) -> Self {
        PauliBasis { sites: self.sites.iter().map(|s| s.canonical()).collect() }
    }
}

/// Measurement outcome on one site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Down,
    Up,
}

impl Spin {
    /// `+1` for up, `-1` for down.
    pub fn sign(self) -> i32 {
        match self {
            Spin::Up => 1,
            Spin::Down => -1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Spin::Up => '+',
            Spin::Down => '-',
        }
    }
}

/// A string of outcomes `s_1 ... s_L`.
///
/// As an integer index, site 0 is the most significant bit and `+` is 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpinConfiguration {
    spins: Vec<Spin>,
}

impl SpinConfiguration {
    pub fn new(spins: Vec<Spin>) -> Self {
        SpinConfiguration { spins }
    }

    pub fn uniform(len: usize, spin: Spin) -> Self {
        SpinConfiguration { spins: alloc::vec![spin; len] }
    }

    pub fn from_index(len: usize, index: u64) -> Self {
        let spins = (0..len)
            .map(|j| if index >> (len - 1 - j) & 1 == 1 { Spin::Up } else { Spin::Down })
            .collect();
        SpinConfiguration { spins }
    }

    pub fn index(&self) -> u64 {
        self.spins.iter().fold(0u64, |acc, s| (acc << 1) | u64::from(*s == Spin::Up))
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    pub fn spin(&self, j: usize) -> Spin {
        self.spins[j]
    }

    pub fn spins(&self) -> &[Spin] {
        &self.spins
    }

    pub fn count_down(&self) -> usize {
        self.spins.iter().filter(|s| **s == Spin::Down).count()
    }
}

impl fmt::Display for SpinConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.spins {
            write!(f, "{}", s.symbol())?;
        }
        Ok(())
    }
}

impl core::str::FromStr for SpinConfiguration {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_configuration(s)
    }
}

/// Parses `+`/`u`/`1` as up and `-`/`d`/`0` (and the Unicode minus) as
/// down. Whitespace and commas are ignored.
pub fn parse_configuration(text: &str) -> Result<SpinConfiguration> {
    let mut spins = Vec::new();
    for (position, ch) in text.chars().enumerate() {
        match ch {
            '+' | 'u' | 'U' | '1' => spins.push(Spin::Up),
            '-' | '\u{2212}' | 'd' | 'D' | '0' => spins.push(Spin::Down),
            c if c.is_whitespace() || c == ',' => {}
            found => return Err(Error::Parse { position, found }),
        }
    }
    Ok(SpinConfiguration { spins })
}

/// The two bras of a site basis as rows over `(|0>, |1>)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalBraPair {
    pub plus: [Complex64; 2],
    pub minus: [Complex64; 2],
}

impl CanonicalBraPair {
    pub fn bra(&self, s: Spin) -> [Complex64; 2] {
        match s {
            Spin::Up => self.plus,
            Spin::Down => self.minus,
        }
    }
}

pub fn canonical_bras(a: SiteAngles) -> CanonicalBraPair {
    let (s, c) = (0.5 * a.theta).sin_cos();
    let ephi = Complex64::from_polar(1.0, a.phi);
    let emalpha = Complex64::from_polar(1.0, -a.alpha);
    CanonicalBraPair {
        plus: [Complex64::new(s, 0.0), ephi * c],
        minus: [-emalpha * c, emalpha * ephi * s],
    }
}

/// The unitary `U(phi, theta, alpha)` whose rows are `<+|` and `<-|`.
pub fn u_matrix(a: SiteAngles) -> [[Complex64; 2]; 2] {
    let b = canonical_bras(a);
    [b.plus, b.minus]
}

/// Human-readable label, e.g. `"uniform(phi=0, theta=1.5708, alpha=0)"`.
pub fn describe(basis: &PauliBasis) -> String {
    match basis.as_uniform() {
        Some(a) => alloc::format!("uniform(phi={}, theta={}, alpha={})", a.phi, a.theta, a.alpha),
        None => alloc::format!("per-site({} sites)", basis.len()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn bras_are_orthonormal() {
        for a in [SiteAngles::Z, SiteAngles::X, SiteAngles::Y, SiteAngles::new(0.3, 2.1, -0.7)] {
            let u = u_matrix(a);
            for r in 0..2 {
                for s in 0..2 {
                    let ip: Complex64 = (0..2).map(|k| u[r][k] * u[s][k].conj()).sum();
                    let want = if r == s { 1.0 } else { 0.0 };
                    assert!((ip - want).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn sigma_z_labels() {
        let b = canonical_bras(SiteAngles::Z);
        assert_eq!(b.plus, [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
        assert_eq!(b.minus, [Complex64::new(-1.0, 0.0), Complex64::new(0.0, 0.0)]);
    }

    #[test]
    fn parse_and_display() {
        let c = parse_configuration("+-ud 10\u{2212}").unwrap();
        assert_eq!(c.to_string(), "+-+-+--");
        assert_eq!(parse_configuration("+-x"), Err(Error::Parse { position: 2, found: 'x' }));
    }

    #[test]
    fn index_round_trip() {
        for idx in 0..32 {
            assert_eq!(SpinConfiguration::from_index(5, idx).index(), idx);
        }
        assert_eq!(SpinConfiguration::from_index(3, 4).to_string(), "+--");
    }

    #[test]
    fn canonical_reduction() {
        let a = SiteAngles::new(-0.5, 7.0, 2.0 * PI).canonical();
        assert!((a.phi - (2.0 * PI - 0.5)).abs() < 1e-15);
        assert!((a.theta - (7.0 - 2.0 * PI)).abs() < 1e-15);
        assert_eq!(a.alpha, 0.0);
    }
}
