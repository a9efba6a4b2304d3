use std::fmt;
use std::sync::Arc;

use num_traits::Float;

use crate::error::ModelError;

type Eval<F> = Arc<dyn Fn(F) -> F + Send + Sync>;

/// User supplied cost curve.
#[derive(Clone)]
pub struct BlackBox<F = f64> {
    pub label: String,
    eval: Eval<F>,
    deriv: Option<Eval<F>>,
    convex: bool,
}

impl<F> BlackBox<F> {
    pub fn new(
        label: impl Into<String>,
        convex: bool,
        eval: impl Fn(F) -> F + Send + Sync + 'static,
    ) -> Self {
        Self { label: label.into(), eval: Arc::new(eval), deriv: None, convex }
    }

    pub fn with_derivative(mut self, deriv: impl Fn(F) -> F + Send + Sync + 'static) -> Self {
        self.deriv = Some(Arc::new(deriv));
        self
    }

    pub fn is_convex(&self) -> bool {
        self.convex
    }

    pub fn has_derivative(&self) -> bool {
        self.deriv.is_some()
    }
}

impl<F> fmt::Debug for BlackBox<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlackBox")
            .field("label", &self.label)
            .field("convex", &self.convex)
            .field("derivative", &self.deriv.is_some())
            .finish()
    }
}

/// Increasing arc cost `r(x)` on `[0, c_a]`.
#[derive(Clone, Debug)]
pub enum CostFunction<F = f64> {
    /// `f·x`
    Linear { f: F },
    /// `f·x²`
    Quadratic { f: F },
    /// `f/(d − x)`, finite for `x < d`.
    Kleinrock { f: F, d: F },
    BlackBox(BlackBox<F>),
}

fn lit<F: Float>(v: f64) -> F {
    F::from(v).expect("float literal")
}

impl<F: Float + Send + Sync + 'static> CostFunction<F> {
    pub fn linear(f: F) -> Result<Self, ModelError> {
        positive("f", f)?;
        Ok(Self::Linear { f })
    }

    pub fn quadratic(f: F) -> Result<Self, ModelError> {
        positive("f", f)?;
        Ok(Self::Quadratic { f })
    }

    pub fn kleinrock(f: F, d: F) -> Result<Self, ModelError> {
        positive("f", f)?;
        positive("d", d)?;
        Ok(Self::Kleinrock { f, d })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Linear { .. } => "linear",
            Self::Quadratic { .. } => "quadratic",
            Self::Kleinrock { .. } => "kleinrock",
            Self::BlackBox(_) => "blackbox",
        }
    }

    pub fn is_convex(&self) -> bool {
        match self {
            Self::BlackBox(b) => b.convex,
            _ => true,
        }
    }

    /// Upper end of the domain, if any.
    pub fn pole(&self) -> Option<F> {
        match self {
            Self::Kleinrock { d, .. } => Some(*d),
            _ => None,
        }
    }

    pub fn evaluate(&self, x: F) -> Result<F, ModelError> {
        self.check_domain(x)?;
        Ok(match self {
            Self::Linear { f } => *f * x,
            Self::Quadratic { f } => *f * x * x,
            Self::Kleinrock { f, d } => *f / (*d - x),
            Self::BlackBox(b) => (b.eval)(x),
        })
    }

    /// `r'(x)`; `cap` sets the finite-difference step of black boxes
    /// without a derivative.
    pub fn derivative(&self, x: F, cap: F) -> Result<F, ModelError> {
        self.check_domain(x)?;
        Ok(match self {
            Self::Linear { f } => *f,
            Self::Quadratic { f } => lit::<F>(2.0) * *f * x,
            Self::Kleinrock { f, d } => *f / ((*d - x) * (*d - x)),
            Self::BlackBox(b) => match &b.deriv {
                Some(g) => g(x),
                None => {
                    let h = fd_step(cap);
                    if x >= h {
                        ((b.eval)(x + h) - (b.eval)(x - h)) / (lit::<F>(2.0) * h)
                    } else {
                        ((b.eval)(x + h) - (b.eval)(x)) / h
                    }
                }
            },
        })
    }

    /// Upper bound on `|r'|` over `[0, cap]`.
    pub fn lipschitz_bound(&self, cap: F) -> F {
        match self {
            Self::Linear { f } => *f,
            Self::Quadratic { f } => lit::<F>(2.0) * *f * cap,
            Self::Kleinrock { f, d } => *f / ((*d - cap) * (*d - cap)),
            Self::BlackBox(b) => {
                if cap <= F::zero() {
                    return F::zero();
                }
                let n = 64;
                let step = cap / F::from(n - 1).unwrap();
                let mut worst = F::zero();
                let mut prev = (b.eval)(F::zero());
                for i in 1..n {
                    let cur = (b.eval)(step * F::from(i).unwrap());
                    worst = worst.max(((cur - prev) / step).abs());
                    prev = cur;
                }
                worst * lit(2.0)
            }
        }
    }

    /// Cost for an arc whose capacity is multiplied by `factor`: the
    /// returned `r'` satisfies `r'(factor·x) = r(x)`.
    pub fn rescaled(&self, factor: F) -> Self {
        match self {
            Self::Linear { f } => Self::Linear { f: *f / factor },
            Self::Quadratic { f } => Self::Quadratic { f: *f / (factor * factor) },
            Self::Kleinrock { f, d } => Self::Kleinrock { f: *f * factor, d: *d * factor },
            Self::BlackBox(b) => {
                let inner = b.eval.clone();
                let mut out = BlackBox {
                    label: b.label.clone(),
                    eval: Arc::new(move |x| inner(x / factor)),
                    deriv: None,
                    convex: b.convex,
                };
                if let Some(g) = b.deriv.clone() {
                    out.deriv = Some(Arc::new(move |x| g(x / factor) / factor));
                }
                Self::BlackBox(out)
            }
        }
    }

    fn check_domain(&self, x: F) -> Result<(), ModelError> {
        let bad = x < F::zero() || x.is_nan() || matches!(self, Self::Kleinrock { d, .. } if x >= *d);
        if bad {
            return Err(ModelError::Domain { kind: self.kind(), x: x.to_f64().unwrap_or(f64::NAN) });
        }
        Ok(())
    }
}

/// Central-difference step used for black boxes.
pub fn fd_step<F: Float>(cap: F) -> F {
    lit::<F>(1e-6).max(lit::<F>(1e-8) * cap)
}

fn positive<F: Float>(name: &str, v: F) -> Result<(), ModelError> {
    if v > F::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(ModelError::BadParameter(format!(
            "{name} must be a positive finite number, got {}",
            v.to_f64().unwrap_or(f64::NAN)
        )))
    }
}
