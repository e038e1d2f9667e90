//! Multilinear nonlinearities `B(u₁,…,u_p)` with a fixed scaling degree.

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::semigroup::spectral_derivative;

#[derive(Debug, Clone, PartialEq)]
pub enum FormKind {
    /// `ν u₁⋯u_p`, scaling degree 0.
    Power,
    /// `ν a·∇(u₁⋯u_p)`, scaling degree 1.
    Convection { direction: Vec<f64> },
    /// `ν ∇u₁·∇u₂`, scaling degree 2.
    HamiltonJacobi,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonlinearForm {
    pub kind: FormKind,
    pub degree: usize,
    pub coefficient: f64,
}

impl NonlinearForm {
    pub fn power(degree: usize, coefficient: f64) -> Result<Self> {
        NonlinearForm { kind: FormKind::Power, degree, coefficient }.validated()
    }

    pub fn convection(degree: usize, direction: Vec<f64>, coefficient: f64) -> Result<Self> {
        NonlinearForm { kind: FormKind::Convection { direction }, degree, coefficient }.validated()
    }

    pub fn hamilton_jacobi(coefficient: f64) -> Result<Self> {
        NonlinearForm { kind: FormKind::HamiltonJacobi, degree: 2, coefficient }.validated()
    }

    fn validated(self) -> Result<Self> {
        if self.degree < 1 {
            return Err(Error::InvalidParameter("form degree must be >= 1".into()));
        }
        if !self.coefficient.is_finite() {
            return Err(Error::InvalidParameter(format!("form coefficient must be finite, got {}", self.coefficient)));
        }
        match &self.kind {
            FormKind::HamiltonJacobi if self.degree != 2 => {
                Err(Error::InvalidParameter("Hamilton-Jacobi form has degree 2".into()))
            }
            FormKind::Convection { direction } if direction.is_empty() || direction.iter().any(|c| !c.is_finite()) => {
                Err(Error::InvalidParameter("convection direction must be a finite non-empty vector".into()))
            }
            _ => Ok(self),
        }
    }

    pub fn scaling_degree(&self) -> u32 {
        match self.kind {
            FormKind::Power => 0,
            FormKind::Convection { .. } => 1,
            FormKind::HamiltonJacobi => 2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            FormKind::Power => "power",
            FormKind::Convection { .. } => "convection",
            FormKind::HamiltonJacobi => "hamilton_jacobi",
        }
    }

    pub fn is_linear_zero(&self) -> bool {
        self.coefficient == 0.0
    }
}

fn product(args: &[&GridFunction]) -> Vec<f64> {
    let mut out = args[0].values().to_vec();
    for u in &args[1..] {
        for (o, v) in out.iter_mut().zip(u.values()) {
            *o *= v;
        }
    }
    out
}

/// `B(u₁,…,u_p)`; the number of arguments must equal the degree.
pub fn eval_form(form: &NonlinearForm, args: &[&GridFunction]) -> Result<GridFunction> {
    if args.len() != form.degree {
        return Err(Error::Arity { expected: form.degree, got: args.len() });
    }
    let geom = *args[0].geometry();
    for u in &args[1..] {
        geom.check_same(u.geometry())?;
    }
    let nu = form.coefficient;
    let values = match &form.kind {
        FormKind::Power => product(args).into_iter().map(|v| nu * v).collect(),
        FormKind::Convection { direction } => {
            if direction.len() != geom.n {
                return Err(Error::InvalidParameter(format!(
                    "convection direction has {} components on an n = {} grid",
                    direction.len(),
                    geom.n
                )));
            }
            let prod = GridFunction::from_parts(geom, product(args));
            let mut acc = vec![0.0; geom.len()];
            for (axis, a) in direction.iter().enumerate() {
                if *a != 0.0 {
                    let d = spectral_derivative(&prod, axis)?;
                    for (o, v) in acc.iter_mut().zip(d.values()) {
                        *o += nu * a * v;
                    }
                }
            }
            acc
        }
        FormKind::HamiltonJacobi => {
            let mut acc = vec![0.0; geom.len()];
            for axis in 0..geom.n {
                let d1 = spectral_derivative(args[0], axis)?;
                let d2 = if std::ptr::eq(args[0], args[1]) { d1.clone() } else { spectral_derivative(args[1], axis)? };
                for ((o, x), y) in acc.iter_mut().zip(d1.values()).zip(d2.values()) {
                    *o += nu * x * y;
                }
            }
            acc
        }
    };
    Ok(GridFunction::from_parts(geom, values))
}

/// `B(u,…,u)`.
pub fn eval_form_diagonal(form: &NonlinearForm, u: &GridFunction) -> Result<GridFunction> {
    let args = vec![u; form.degree];
    eval_form(form, &args)
}
