use crate::error::{Error, Result};
use crate::objective::{BatchSelector, Objective};
use crate::vector::ParamVector;

/// Exponential grid `10⁻⁶, 10⁻⁵, …, 10²`.
pub const AUTO_SEARCH_GRID: [f64; 9] = [1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2];

/// Picks the initial learning rate with the smallest `L(w - η g)` over
/// [`AUTO_SEARCH_GRID`]. Ties go to the smaller `η`; non-finite probes are skipped.
pub fn auto_search_eta0(
    obj: &dyn Objective,
    w: &ParamVector,
    direction: &ParamVector,
    batch: &BatchSelector,
) -> Result<f64> {
    if direction.is_zero() {
        return Err(Error::InvalidArgument("direction must be nonzero".into()));
    }
    let mut best: Option<(f64, f64)> = None;
    for &eta in &AUTO_SEARCH_GRID {
        let Ok(loss) = w.axpy(-eta, direction).and_then(|p| obj.loss(&p, batch)) else {
            continue;
        };
        if best.is_none_or(|(_, l)| loss < l) {
            best = Some((eta, loss));
        }
    }
    best.map(|(eta, _)| eta).ok_or(Error::NonFinite("every auto-search probe"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Result;
    use crate::objective::finite_loss;
    use crate::problems::QuadraticProblem;

    fn pv(v: &[f64]) -> ParamVector {
        ParamVector::from_slice(v).unwrap()
    }

    #[test]
    fn finds_unit_step_on_identity_quadratic() {
        let p = QuadraticProblem::diagonal(&[1.0, 1.0]).unwrap();
        let w = pv(&[1.0, 0.0]);
        let g = p.grad(&w, &BatchSelector::FullData).unwrap();
        assert_eq!(auto_search_eta0(&p, &w, &g, &BatchSelector::FullData).unwrap(), 1.0);
    }

    #[test]
    fn uphill_direction_picks_smallest() {
        let p = QuadraticProblem::diagonal(&[1.0, 1.0]).unwrap();
        let w = pv(&[1.0, 0.0]);
        let uphill = pv(&[-1.0, 0.0]);
        assert_eq!(auto_search_eta0(&p, &w, &uphill, &BatchSelector::FullData).unwrap(), 1e-6);
    }

    struct Decreasing;

    impl Objective for Decreasing {
        fn dim(&self) -> usize {
            1
        }
        fn loss(&self, w: &ParamVector, _: &BatchSelector) -> Result<f64> {
            finite_loss(-w[0])
        }
        fn grad(&self, _: &ParamVector, _: &BatchSelector) -> Result<ParamVector> {
            ParamVector::new(vec![-1.0])
        }
    }

    struct Exploding;

    impl Objective for Exploding {
        fn dim(&self) -> usize {
            1
        }
        fn loss(&self, _: &ParamVector, _: &BatchSelector) -> Result<f64> {
            finite_loss(f64::NAN)
        }
        fn grad(&self, _: &ParamVector, _: &BatchSelector) -> Result<ParamVector> {
            ParamVector::new(vec![1.0])
        }
    }

    #[test]
    fn monotone_loss_picks_largest() {
        let eta = auto_search_eta0(&Decreasing, &pv(&[0.0]), &pv(&[-1.0]), &BatchSelector::FullData).unwrap();
        assert_eq!(eta, 100.0);
    }

    #[test]
    fn all_non_finite_is_an_error() {
        assert!(auto_search_eta0(&Exploding, &pv(&[0.0]), &pv(&[1.0]), &BatchSelector::FullData).is_err());
    }
}
