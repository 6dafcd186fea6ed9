//! Ion-trap coupling model: equilibrium of a linear Coulomb crystal in a
//! harmonic axial potential, its Hessian, and the magnetic-gradient induced
//! coupling matrix `J = (1/ħ)(μB₁/2)² H⁻¹`.
//!
//! Positions are solved in units of `ℓ = (Kq²/(Mω²))^{1/3}` where the scaled
//! potential is `Σ ½u² + Σ_{i<j} 1/|u_i − u_j|`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::{Error, HollowSymmetric, Result};

pub const COULOMB_K: f64 = 8.987_551_792_3e9;
pub const HBAR: f64 = 1.054_571_817e-34;
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
pub const ATOMIC_MASS: f64 = 1.660_539_066_60e-27;
pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;
/// Hyperfine splitting of ¹⁷¹Yb⁺ in Hz.
pub const YB171_F0: f64 = 12.642_812_118_466e9;

fn default_hbar() -> f64 {
    HBAR
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrapParams {
    pub ions: usize,
    /// kg
    pub mass: f64,
    /// C
    pub charge: f64,
    /// Axial trap angular frequency, rad/s.
    pub omega_z: f64,
    /// Magnetic field gradient, T/m.
    pub b1: f64,
    /// Effective magnetic moment, J/T.
    pub mu: f64,
    /// Zeeman sublevel of the qubit state per ion, in {-1, 0, +1}.
    pub m_f: Vec<i8>,
    #[serde(default = "default_hbar")]
    pub hbar: f64,
    /// Rabi frequency, rad/s. Metadata only, not used for `J`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rabi: Option<f64>,
}

impl TrapParams {
    /// ¹⁷¹Yb⁺ with a 100 T/m gradient and 2π·100 kHz axial frequency, all
    /// ions magnetically sensitive.
    pub fn yb171_paper(ions: usize) -> Self {
        let two_pi = 2.0 * std::f64::consts::PI;
        Self {
            ions,
            mass: 171.0 * ATOMIC_MASS,
            charge: ELEMENTARY_CHARGE,
            omega_z: two_pi * 100e3,
            b1: 100.0,
            mu: BOHR_MAGNETON,
            m_f: vec![1; ions],
            hbar: HBAR,
            rabi: Some(two_pi * 100e3),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInput(m.to_string()));
        if self.ions == 0 {
            return bad("at least one ion is required");
        }
        if !(self.omega_z > 0.0) || !(self.mass > 0.0) || !(self.charge > 0.0) {
            return bad("mass, charge and omega_z must be positive");
        }
        if !(self.b1 >= 0.0) || !(self.hbar > 0.0) || !self.mu.is_finite() {
            return bad("b1 must be non-negative and hbar positive");
        }
        if self.m_f.len() != self.ions {
            return Err(Error::DimensionMismatch { expected: self.ions, got: self.m_f.len() });
        }
        if self.m_f.iter().any(|m| !(-1..=1).contains(m)) {
            return bad("m_f entries must be -1, 0 or +1");
        }
        Ok(())
    }

    /// Length scale `ℓ` in metres.
    pub fn length_scale(&self) -> f64 {
        (COULOMB_K * self.charge * self.charge / (self.mass * self.omega_z * self.omega_z)).cbrt()
    }
}

/// Couplings in rad/s.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingMatrix {
    #[serde(rename = "J")]
    pub j: HollowSymmetric,
}

/// Potential energy model in scaled units. Only the harmonic trap is
/// provided; other axial potentials plug in here.
pub trait AxialPotential {
    fn gradient(&self, u: f64) -> f64;
    fn curvature(&self, u: f64) -> f64;
}

pub struct Harmonic;

impl AxialPotential for Harmonic {
    fn gradient(&self, u: f64) -> f64 {
        u
    }
    fn curvature(&self, _u: f64) -> f64 {
        1.0
    }
}

fn scaled_gradient(u: &[f64], pot: &dyn AxialPotential) -> DVector<f64> {
    let n = u.len();
    DVector::from_fn(n, |i, _| {
        let mut g = pot.gradient(u[i]);
        for (j, &uj) in u.iter().enumerate() {
            if j != i {
                let d = u[i] - uj;
                g -= d.signum() / (d * d);
            }
        }
        g
    })
}

fn scaled_hessian(u: &[f64], pot: &dyn AxialPotential) -> DMatrix<f64> {
    let n = u.len();
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = pot.curvature(u[i]);
        for j in 0..n {
            if j != i {
                let c = 2.0 / (u[i] - u[j]).abs().powi(3);
                h[(i, i)] += c;
                h[(i, j)] = -c;
            }
        }
    }
    h
}

fn scaled_energy(u: &[f64]) -> f64 {
    let mut e: f64 = u.iter().map(|x| 0.5 * x * x).sum();
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            e += 1.0 / (u[i] - u[j]).abs();
        }
    }
    e
}

/// Equilibrium positions in units of `ℓ`, strictly increasing.
pub fn equilibrium_scaled(ions: usize) -> Result<Vec<f64>> {
    if ions == 0 {
        return Err(Error::InvalidInput("at least one ion is required".into()));
    }
    if ions == 1 {
        return Ok(vec![0.0]);
    }
    let half = ions as f64 / 2.0;
    let mut u: Vec<f64> = (0..ions).map(|i| 0.5 * (-half + (2.0 * half) * i as f64 / (ions - 1) as f64)).collect();
    for _ in 0..200 {
        let g = scaled_gradient(&u, &Harmonic);
        if g.amax() < 1e-13 {
            return Ok(u);
        }
        let h = scaled_hessian(&u, &Harmonic);
        let step = h.lu().solve(&g).ok_or_else(|| Error::Numerical("singular Hessian in equilibrium search".into()))?;
        let e0 = scaled_energy(&u);
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = u.iter().zip(step.iter()).map(|(x, s)| x - t * s).collect();
            let ordered = trial.windows(2).all(|w| w[0] < w[1]);
            if ordered && scaled_energy(&trial) <= e0 + 1e-13 * e0.abs() {
                u = trial;
                break;
            }
            t *= 0.5;
            if t < 1e-12 {
                return Err(Error::Numerical("line search failed in equilibrium search".into()));
            }
        }
    }
    let g = scaled_gradient(&u, &Harmonic);
    if g.amax() < 1e-10 {
        Ok(u)
    } else {
        Err(Error::Numerical(format!("equilibrium did not converge, residual {}", g.amax())))
    }
}

/// Equilibrium positions in metres.
pub fn equilibrium_positions(p: &TrapParams) -> Result<Vec<f64>> {
    p.validate()?;
    let l = p.length_scale();
    Ok(equilibrium_scaled(p.ions)?.into_iter().map(|u| u * l).collect())
}

/// Hessian of the total potential at `zbar` (metres), in J/m².
pub fn hessian(p: &TrapParams, zbar: &[f64]) -> Result<DMatrix<f64>> {
    p.validate()?;
    if zbar.len() != p.ions {
        return Err(Error::DimensionMismatch { expected: p.ions, got: zbar.len() });
    }
    let l = p.length_scale();
    let u: Vec<f64> = zbar.iter().map(|z| z / l).collect();
    let h = scaled_hessian(&u, &Harmonic) * (p.mass * p.omega_z * p.omega_z);
    if h.clone().cholesky().is_none() {
        return Err(Error::Numerical("Hessian is not positive definite".into()));
    }
    Ok(h)
}

/// `J = (1/ħ)(μB₁/2)² H⁻¹`, diagonal dropped, masked by `m_F m_Fᵀ`.
pub fn coupling_matrix(p: &TrapParams) -> Result<CouplingMatrix> {
    let z = equilibrium_positions(p)?;
    let h = hessian(p, &z)?;
    let inv = h.cholesky().map(|c| c.inverse()).ok_or_else(|| Error::Numerical("singular Hessian".into()))?;
    let pref = (p.mu * p.b1 / 2.0).powi(2) / p.hbar;
    let j = HollowSymmetric::from_fn(p.ions, |a, b| pref * inv[(a, b)] * f64::from(p.m_f[a]) * f64::from(p.m_f[b]));
    Ok(CouplingMatrix { j })
}

/// First-order Zeeman transition frequency `2πf₀ + m_F μB/ħ` in rad/s.
pub fn transition_frequency(m_f: i8, b: f64, mu: f64, hbar: f64, f0: f64) -> f64 {
    2.0 * std::f64::consts::PI * f0 + f64::from(m_f) * mu * b / hbar
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_ion_sits_at_the_origin() {
        assert_eq!(equilibrium_scaled(1).unwrap(), vec![0.0]);
        let p = TrapParams::yb171_paper(1);
        let h = hessian(&p, &[0.0]).unwrap();
        let want = p.mass * p.omega_z * p.omega_z;
        assert!((h[(0, 0)] - want).abs() <= 1e-12 * want);
    }

    #[test]
    fn two_ion_hessian_off_diagonal() {
        let p = TrapParams::yb171_paper(2);
        let z = equilibrium_positions(&p).unwrap();
        let h = hessian(&p, &z).unwrap();
        let d = z[1] - z[0];
        let want = -2.0 * COULOMB_K * p.charge * p.charge / d.powi(3);
        assert!((h[(0, 1)] - want).abs() <= 1e-10 * want.abs());
        assert_eq!(h[(0, 1)], h[(1, 0)]);
    }

    #[test]
    fn zero_gradient_or_pi_qubits_decouple() {
        let mut p = TrapParams::yb171_paper(4);
        p.b1 = 0.0;
        assert!(coupling_matrix(&p).unwrap().j.is_zero());
        let mut p = TrapParams::yb171_paper(4);
        p.m_f = vec![0; 4];
        assert!(coupling_matrix(&p).unwrap().j.is_zero());
        let mut p = TrapParams::yb171_paper(4);
        p.m_f[1] = 0;
        let j = coupling_matrix(&p).unwrap().j;
        assert!((0..4).all(|k| j.get(1, k) == 0.0));
        assert!(j.get(0, 2) > 0.0);
    }

    #[test]
    fn zeeman_shift_is_linear() {
        let f = |m, b| transition_frequency(m, b, BOHR_MAGNETON, HBAR, YB171_F0);
        assert_eq!(f(0, 1e-3), 2.0 * std::f64::consts::PI * YB171_F0);
        let base = f(0, 0.0);
        let s1 = f(1, 1e-3) - base;
        let s2 = f(1, 2e-3) - base;
        assert!((s2 - 2.0 * s1).abs() <= 1e-6 * s1.abs());
    }

    #[test]
    fn invalid_params_rejected() {
        let mut p = TrapParams::yb171_paper(3);
        p.m_f = vec![1, 2, 1];
        assert!(coupling_matrix(&p).is_err());
        p.m_f = vec![1, 1];
        assert!(coupling_matrix(&p).is_err());
    }
}
