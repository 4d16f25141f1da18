//! Amplitudes `<S | R>` in arbitrary local Pauli bases as a single Pfaffian.
//!
//! For even `L` the amplitude is `sign * e^{-i sum_{S-} alpha} pf(M) / N_R`
//! where, for `n < m`,
//!
//! ```text
//! M_nm = C_nm r_nm e^{i(phi_n + phi_m)} + (-1)^{n+m} (-1)^{(s_n + s_m)/2} X_nm
//! ```
//!
//! `C_nm` is the product over `{n, m}` of `cos(theta/2)` for `+` and
//! `sin(theta/2)` for `-`, and `X_nm` is the same product with cos and sin
//! exchanged. Odd `L` is handled by appending an ancilla site with a zero
//! row of `R`, outcome `s_{L+1} = s_1` and angles `(0, pi/2, 0)`; the
//! amplitude then picks up an extra `sqrt(2)`. The overall sign is
//! `(-1)^{L(1 - s_1)/2}` with the original `L`.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::basis::{PauliBasis, SiteAngles, Spin, SpinConfiguration};
use crate::error::{Error, Result};
use crate::skewlin::{pfaffian, pfaffian_row_major, SkewMatrix};
use crate::state::{normalization, GaussianPureState};

/// Half-width of the excluded band around `theta in {0, pi, 2pi}` for the
/// tan form.
pub const TAN_SINGULAR_BAND: f64 = 1e-6;

/// Which closed form evaluates the amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvalPath {
    /// Currently always the m-form, which has no singular angles.
    #[default]
    Auto,
    MForm,
    TanForm,
    /// Only for bases `(phi, pi/2, 0)` with a common `phi`.
    DomainWall,
}

#[derive(Debug, Clone, Copy)]
pub struct AmplitudeRequest<'a> {
    pub state: &'a GaussianPureState,
    pub basis: &'a PauliBasis,
    pub config: &'a SpinConfiguration,
    pub path: EvalPath,
}

/// Basis angles and outcome of one site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SitePoint {
    pub phi: f64,
    pub theta: f64,
    pub alpha: f64,
    pub spin: Spin,
}

impl SitePoint {
    pub fn new(angles: SiteAngles, spin: Spin) -> Self {
        SitePoint { phi: angles.phi, theta: angles.theta, alpha: angles.alpha, spin }
    }

    /// The ancilla appended for odd `L`.
    pub fn ancilla(spin: Spin) -> Self {
        SitePoint { phi: 0.0, theta: FRAC_PI_2, alpha: 0.0, spin }
    }

    fn up(&self) -> bool {
        self.spin == Spin::Up
    }

    /// `(cos or sin, sin or cos)` of `theta/2`, the first matching the spin.
    fn trig(&self) -> (f64, f64) {
        let (s, c) = (0.5 * self.theta).sin_cos();
        if self.up() {
            (c, s)
        } else {
            (s, c)
        }
    }
}

fn parity_sign(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `(-1)^{(s_n + s_m)/2}`: `-1` for equal spins, `+1` otherwise.
fn spin_pair_sign(a: Spin, b: Spin) -> f64 {
    if a == b {
        -1.0
    } else {
        1.0
    }
}

/// One entry `M_nm` for sites at positions `n < m`.
pub fn m_entry(r_nm: Complex64, n: usize, m: usize, a: &SitePoint, b: &SitePoint) -> Complex64 {
    let (ca, xa) = a.trig();
    let (cb, xb) = b.trig();
    let phase = Complex64::from_polar(1.0, a.phi + b.phi);
    r_nm * phase * (ca * cb) + parity_sign(n + m) * spin_pair_sign(a.spin, b.spin) * xa * xb
}

/// `e^{-i sum_{S-} alpha}`.
pub fn alpha_phase(sites: &[SitePoint]) -> Complex64 {
    let total: f64 = sites.iter().filter(|s| !s.up()).map(|s| s.alpha).sum();
    Complex64::from_polar(1.0, -total)
}

/// `pf(M)` for a standalone system whose `R` restriction is `r`, with
/// positions counted from the start of `sites`.
pub(crate) fn pf_m(r: &SkewMatrix, sites: &[SitePoint]) -> Complex64 {
    let n = sites.len();
    let mut buf = alloc::vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = m_entry(r.get(i, j), i, j, &sites[i], &sites[j]);
            buf[i * n + j] = v;
            buf[j * n + i] = -v;
        }
    }
    pfaffian_row_major(buf, n)
}

/// `b_S = e^{-i sum alpha} pf(M)` of a standalone even system.
pub fn system_b(r: &SkewMatrix, sites: &[SitePoint]) -> Complex64 {
    alpha_phase(sites) * pf_m(r, sites)
}

/// The system with the odd-`L` ancilla appended where needed.
#[derive(Debug, Clone)]
pub struct PaddedProblem {
    pub r: SkewMatrix,
    pub sites: Vec<SitePoint>,
    pub original_len: usize,
}

impl PaddedProblem {
    pub fn new(
        state: &GaussianPureState,
        basis: &PauliBasis,
        config: &SpinConfiguration,
    ) -> Result<Self> {
        let l = check_inputs(state, basis, config)?;
        let mut sites: Vec<SitePoint> =
            (0..l).map(|j| SitePoint::new(basis.site(j), config.spin(j))).collect();
        let r = if l % 2 == 1 {
            sites.push(SitePoint::ancilla(config.spin(0)));
            state.r_matrix().padded(1)
        } else {
            state.r_matrix().clone()
        };
        Ok(PaddedProblem { r, sites, original_len: l })
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn is_padded(&self) -> bool {
        self.sites.len() != self.original_len
    }

    /// `(-1)^{L(1 - s_1)/2} sqrt(2)^{L mod 2}` with the original `L`.
    pub fn prefactor(&self) -> f64 {
        let sign = if self.sites[0].up() { 1.0 } else { parity_sign(self.original_len) };
        if self.is_padded() {
            sign * SQRT_2
        } else {
            sign
        }
    }
}

fn check_inputs(
    state: &GaussianPureState,
    basis: &PauliBasis,
    config: &SpinConfiguration,
) -> Result<usize> {
    state.require_vacuum_base()?;
    let l = state.len();
    if l == 0 {
        return Err(Error::InvalidArgument("amplitudes need at least one site".into()));
    }
    if basis.len() != l {
        return Err(Error::LengthMismatch { expected: l, found: basis.len() });
    }
    if config.len() != l {
        return Err(Error::LengthMismatch { expected: l, found: config.len() });
    }
    Ok(l)
}

/// The amplitude split as `(value without the alpha phase, alpha phase)`.
/// Probabilities use the first factor only, so they do not depend on alpha
/// even in the last bit.
pub(crate) fn m_form_parts(
    state: &GaussianPureState,
    basis: &PauliBasis,
    config: &SpinConfiguration,
) -> Result<(Complex64, Complex64)> {
    let p = PaddedProblem::new(state, basis, config)?;
    let value = pf_m(&p.r, &p.sites) * (p.prefactor() / state.norm());
    Ok((value, alpha_phase(&p.sites)))
}

/// Amplitude by the m-form (positive powers of cos and sin, no singular
/// angles).
pub fn amplitude_m_form(
    state: &GaussianPureState,
    basis: &PauliBasis,
    config: &SpinConfiguration,
) -> Result<Complex64> {
    let (v, phase) = m_form_parts(state, basis, config)?;
    Ok(v * phase)
}

fn check_tan_band(basis: &PauliBasis) -> Result<()> {
    for (site, a) in basis.sites().iter().enumerate() {
        let t = a.canonical().theta;
        let distance = t.abs().min((t - PI).abs()).min((t - 2.0 * PI).abs());
        if distance < TAN_SINGULAR_BAND {
            return Err(Error::SingularAngle { site, theta: a.theta, band: TAN_SINGULAR_BAND });
        }
    }
    Ok(())
}

/// Amplitude by the tan form: `R^S_nm = r_nm e^{i(phi_n+phi_m)} +
/// (-1)^{n+m} (-1)^{(s_n+s_m)/2} tan^{s_n}(theta_n/2) tan^{s_m}(theta_m/2)`
/// times the product of cos (for `+`) and sin (for `-`) over all sites,
/// ancilla included. Refuses angles within [`TAN_SINGULAR_BAND`] of
/// `0, pi, 2pi`.
pub fn amplitude_tan_form(
    state: &GaussianPureState,
    basis: &PauliBasis,
    config: &SpinConfiguration,
) -> Result<Complex64> {
    tan_form(state, basis, config, 1.0)
}

/// The tan form with the sign of the tan-product term multiplied by
/// `cross_sign`. Only used to check that validation catches a wrong sign.
#[doc(hidden)]
pub fn amplitude_tan_form_mutated(
    state: &GaussianPureState,
    basis: &PauliBasis,
    config: &SpinConfiguration,
    cross_sign: f64,
) -> Result<Complex64> {
    tan_form(state, basis, config, cross_sign)
}

fn tan_form(
    state: &GaussianPureState,
    basis: &PauliBasis,
    config: &SpinConfiguration,
    cross_sign: f64,
) -> Result<Complex64> {
    let p = PaddedProblem::new(state, basis, config)?;
    check_tan_band(basis)?;
    let n = p.len();
    let t: Vec<f64> = p
        .sites
        .iter()
        .map(|s| {
            let (c, x) = s.trig();
            x / c
        })
        .collect();
    let mut buf = alloc::vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (&p.sites[i], &p.sites[j]);
            let v = p.r.get(i, j) * Complex64::from_polar(1.0, a.phi + b.phi)
                + cross_sign * parity_sign(i + j) * spin_pair_sign(a.spin, b.spin) * t[i] * t[j];
            buf[i * n + j] = v;
            buf[j * n + i] = -v;
        }
    }
    let trig: f64 = p.sites.iter().map(|s| s.trig().0).product();
    let pf = pfaffian_row_major(buf, n);
    Ok(pf * alpha_phase(&p.sites) * (trig * p.prefactor() / state.norm()))
}

/// Evaluates a request along its path.
pub fn amplitude(req: &AmplitudeRequest<'_>) -> Result<Complex64> {
    match req.path {
        EvalPath::Auto | EvalPath::MForm => amplitude_m_form(req.state, req.basis, req.config),
        EvalPath::TanForm => amplitude_tan_form(req.state, req.basis, req.config),
        EvalPath::DomainWall => {
            let phi = domain_wall_phi(req.basis)?;
            DomainWallFrame::new(req.state, phi)?.amplitude(req.config)
        }
    }
}

fn closed_form_uniform(
    state: &GaussianPureState,
    basis: &PauliBasis,
    spin: Spin,
) -> Result<Complex64> {
    let l = state.len();
    let config = SpinConfiguration::uniform(l, spin);
    let p = PaddedProblem::new(state, basis, &config)?;
    let n = p.len();
    let up = spin == Spin::Up;
    let m = SkewMatrix::from_upper_fn(n, |i, j| {
        let (si, ci) = (0.5 * p.sites[i].theta).sin_cos();
        let (sj, cj) = (0.5 * p.sites[j].theta).sin_cos();
        let rphi = p.r.get(i, j) * Complex64::from_polar(1.0, p.sites[i].phi + p.sites[j].phi);
        if up {
            rphi * (ci * cj) - parity_sign(i + j) * si * sj
        } else {
            rphi * (si * sj) - parity_sign(i + j) * ci * cj
        }
    });
    Ok(pfaffian(&m) * alpha_phase(&p.sites) * (p.prefactor() / state.norm()))
}

/// The all-plus amplitude, with
/// `M_nm = cos cos r_nm e^{i(phi_n+phi_m)} - (-1)^{n+m} sin sin`.
pub fn amplitude_all_plus(state: &GaussianPureState, basis: &PauliBasis) -> Result<Complex64> {
    closed_form_uniform(state, basis, Spin::Up)
}

/// The all-minus amplitude, with
/// `M_nm = sin sin r_nm e^{i(phi_n+phi_m)} - (-1)^{n+m} cos cos` and the
/// sign `(-1)^L`.
pub fn amplitude_all_minus(state: &GaussianPureState, basis: &PauliBasis) -> Result<Complex64> {
    closed_form_uniform(state, basis, Spin::Down)
}

fn domain_wall_phi(basis: &PauliBasis) -> Result<f64> {
    let a = basis.as_uniform().ok_or_else(|| {
        Error::InvalidArgument("the domain-wall route needs the same basis on every site".into())
    })?;
    let c = a.canonical();
    let theta_ok = (c.theta - FRAC_PI_2).abs() < 1e-12;
    let alpha_ok = c.alpha.abs() < 1e-12 || (c.alpha - 2.0 * PI).abs() < 1e-12;
    if !theta_ok || !alpha_ok {
        return Err(Error::InvalidArgument(
            "the domain-wall route needs a (phi, pi/2, 0) basis".into(),
        ));
    }
    Ok(a.phi)
}

/// Amplitudes in the `(phi, pi/2, 0)` basis through domain walls:
/// `sgn(S) pf(R~ restricted to the walls of S) / (sqrt(2) N_{R~})` with
/// `R~ = (1 + W P)(W P - 1)^{-1}`, `W = (R^phi - 1)(R^phi + 1)^{-1}`,
/// `R^phi = e^{2 i phi} R`. Wall `j` sits between sites `j` and `j+1 mod L`.
///
/// That expression fixes the state only up to a global phase;
/// [`DomainWallFrame::amplitude`] multiplies it by the phase of the all-plus
/// closed form so the result coincides with the other paths.
#[derive(Debug, Clone)]
pub struct DomainWallFrame {
    r_tilde: SkewMatrix,
    norm_tilde: f64,
    pin: Complex64,
}

impl DomainWallFrame {
    pub fn new(state: &GaussianPureState, phi: f64) -> Result<Self> {
        state.require_vacuum_base()?;
        let l = state.len();
        if l < 2 {
            return Err(Error::InvalidArgument("the domain-wall route needs L >= 2".into()));
        }
        let id = nalgebra::DMatrix::<Complex64>::identity(l, l);
        let rphi = state.r_matrix().as_matrix() * Complex64::from_polar(1.0, 2.0 * phi);
        let w = (&rphi - &id) * crate::linalg::inverse(&(&rphi + &id), "(R^phi + 1)^-1")?;
        let mut p = nalgebra::DMatrix::<Complex64>::zeros(l, l);
        p[(0, l - 1)] = Complex64::new(1.0, 0.0);
        for i in 1..l {
            p[(i, i - 1)] = Complex64::new(-1.0, 0.0);
        }
        let wp = w * p;
        let rt = (&id + &wp) * crate::linalg::inverse(&(&wp - &id), "(W P - 1)^-1")?;
        let r_tilde = SkewMatrix::antisymmetrized(rt);
        let norm_tilde = normalization(&r_tilde);

        let basis = PauliBasis::uniform(l, SiteAngles::new(phi, FRAC_PI_2, 0.0));
        let reference = amplitude_all_plus(state, &basis)?;
        let raw_all_plus = 1.0 / (SQRT_2 * norm_tilde);
        if reference.norm() < 1e-12 * raw_all_plus {
            return Err(Error::Singular("the domain-wall phase reference"));
        }
        let pin = reference / reference.norm();
        Ok(DomainWallFrame { r_tilde, norm_tilde, pin })
    }

    pub fn r_tilde(&self) -> &SkewMatrix {
        &self.r_tilde
    }

    /// The printed expression, without the phase pin.
    pub fn raw_amplitude(&self, config: &SpinConfiguration) -> Result<Complex64> {
        let l = self.r_tilde.dim();
        if config.len() != l {
            return Err(Error::LengthMismatch { expected: l, found: config.len() });
        }
        let walls: Vec<usize> =
            (0..l).filter(|&j| config.spin(j) != config.spin((j + 1) % l)).collect();
        let sign = parity_sign(config.count_down());
        Ok(pfaffian(&self.r_tilde.restrict(&walls)) * (sign / (SQRT_2 * self.norm_tilde)))
    }

    pub fn amplitude(&self, config: &SpinConfiguration) -> Result<Complex64> {
        Ok(self.raw_amplitude(config)? * self.pin)
    }
}

/// Phase-pinned domain-wall amplitude; see [`DomainWallFrame`].
pub fn domain_wall_amplitude(
    state: &GaussianPureState,
    phi: f64,
    config: &SpinConfiguration,
) -> Result<Complex64> {
    DomainWallFrame::new(state, phi)?.amplitude(config)
}

/// Residuals of the three `L = 4` quadratic amplitude relations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelationsReport {
    /// `a---- a++++ = a++-- a--++ - a+-+- a-+-+ + a+--+ a-++-` in sigma-z.
    pub sigma_z: f64,
    /// `a++++ a+-+- = a+-++ a+++- - a+--+ a++-- + a+--- a++-+`.
    pub plus_sector: f64,
    /// `a---- a-+-+ = a-+-- a---+ - a-++- a--++ + a-+++ a--+-`.
    pub minus_sector: f64,
}

impl RelationsReport {
    pub fn max(&self) -> f64 {
        self.sigma_z.max(self.plus_sector).max(self.minus_sector)
    }
}

/// Checks the `L = 4` relations. The sigma-z relation is evaluated in the
/// sigma-z basis; the other two in `basis`, which must be a uniform
/// `(phi, pi/2, 0)` basis.
pub fn amplitude_relations_check(
    state: &GaussianPureState,
    basis: &PauliBasis,
) -> Result<RelationsReport> {
    if state.len() != 4 {
        return Err(Error::LengthMismatch { expected: 4, found: state.len() });
    }
    domain_wall_phi(basis)?;
    let z = PauliBasis::uniform(4, SiteAngles::Z);
    let eval = |b: &PauliBasis, s: &str| -> Result<Complex64> {
        amplitude_m_form(state, b, &crate::basis::parse_configuration(s)?)
    };
    let za = |s: &str| eval(&z, s);
    let xa = |s: &str| eval(basis, s);
    let sigma_z = (za("----")? * za("++++")?
        - (za("++--")? * za("--++")? - za("+-+-")? * za("-+-+")? + za("+--+")? * za("-++-")?))
    .norm();
    let plus_sector = (xa("++++")? * xa("+-+-")?
        - (xa("+-++")? * xa("+++-")? - xa("+--+")? * xa("++--")? + xa("+---")? * xa("++-+")?))
    .norm();
    let minus_sector = (xa("----")? * xa("-+-+")?
        - (xa("-+--")? * xa("---+")? - xa("-++-")? * xa("--++")? + xa("-+++")? * xa("--+-")?))
    .norm();
    Ok(RelationsReport { sigma_z, plus_sector, minus_sector })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::parse_configuration;
    use crate::state::random_state;

    #[test]
    fn vacuum_in_sigma_z() {
        let s = GaussianPureState::vacuum(3);
        let z = PauliBasis::uniform(3, SiteAngles::Z);
        let a = amplitude_m_form(&s, &z, &parse_configuration("---").unwrap()).unwrap();
        // <-| at theta = 0 is -<0|.
        assert!((a - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        let a = amplitude_m_form(&s, &z, &parse_configuration("-+-").unwrap()).unwrap();
        assert!(a.norm() < 1e-15);
    }

    #[test]
    fn tan_band_is_refused() {
        let s = random_state(4, 1, 1.0);
        let z = PauliBasis::uniform(4, SiteAngles::Z);
        let c = parse_configuration("+-+-").unwrap();
        assert!(matches!(amplitude_tan_form(&s, &z, &c), Err(Error::SingularAngle { site: 0, .. })));
        let near = PauliBasis::uniform(4, SiteAngles::new(0.1, PI + 1e-8, 0.0));
        assert!(amplitude_tan_form(&s, &near, &c).is_err());
    }

    #[test]
    fn closed_forms_match_m_form() {
        for l in 2..7 {
            let s = random_state(l, 40 + l as u64, 1.0);
            let b = PauliBasis::per_site(
                (0..l).map(|j| SiteAngles::new(0.3 * j as f64, 0.4 + 0.5 * j as f64, 0.2)).collect(),
            );
            let up = SpinConfiguration::uniform(l, Spin::Up);
            let down = SpinConfiguration::uniform(l, Spin::Down);
            let d1 = amplitude_all_plus(&s, &b).unwrap() - amplitude_m_form(&s, &b, &up).unwrap();
            let d2 = amplitude_all_minus(&s, &b).unwrap() - amplitude_m_form(&s, &b, &down).unwrap();
            assert!(d1.norm() < 1e-13 && d2.norm() < 1e-13, "L = {l}");
        }
    }

    #[test]
    fn rejects_length_mismatch() {
        let s = random_state(4, 1, 1.0);
        let b = PauliBasis::uniform(3, SiteAngles::X);
        let c = parse_configuration("+-+").unwrap();
        assert!(matches!(amplitude_m_form(&s, &b, &c), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn domain_wall_needs_x_like_basis() {
        let s = random_state(4, 2, 1.0);
        let req = AmplitudeRequest {
            state: &s,
            basis: &PauliBasis::uniform(4, SiteAngles::Z),
            config: &parse_configuration("++++").unwrap(),
            path: EvalPath::DomainWall,
        };
        assert!(matches!(amplitude(&req), Err(Error::InvalidArgument(_))));
    }
}
