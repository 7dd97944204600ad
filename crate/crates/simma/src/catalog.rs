//! Canonical reference models: one per qualitative regime the classifier
//! distinguishes. The `table` subcommand reproduces this classification and
//! the acceptance suite pins it.

use crate::criteria::{MixedModel, VerdictStatus};
use crate::kernels::{Kernel, KernelPair};
use crate::noise::{LevyMeasure, NoiseComponent};

pub struct CatalogEntry {
    pub name: &'static str,
    pub model: MixedModel,
    pub expected: VerdictStatus,
    /// For infinite-variation entries, the justification must come from the
    /// necessity family; for the indeterminate entry, the report must carry
    /// the outside-both-theorems note.
    pub note: &'static str,
}

pub fn canonical_models() -> Vec<CatalogEntry> {
    let tempered = |beta: f64| LevyMeasure::tempered_stable(1.0, 1.0, beta, 1.0, 1.0).unwrap();
    let stable = LevyMeasure::stable(1.0, 1.0, 1.5).unwrap();
    let atoms = LevyMeasure::finite_atoms(vec![(1.0, 1.0), (-1.0, 1.0)]).unwrap();
    vec![
        CatalogEntry {
            name: "fractional(0.25) + tempered_stable(beta=1.2)",
            model: MixedModel::single(
                NoiseComponent::jumps(1.0, tempered(1.2)),
                KernelPair::anchored(Kernel::fractional(0.25)),
            )
            .unwrap(),
            expected: VerdictStatus::FiniteVariation,
            note: "the 1/(1-α) moment of the tempered measure is finite",
        },
        CatalogEntry {
            name: "fractional(0.25) + tempered_stable(beta=1.5)",
            model: MixedModel::single(
                NoiseComponent::jumps(1.0, tempered(1.5)),
                KernelPair::anchored(Kernel::fractional(0.25)),
            )
            .unwrap(),
            expected: VerdictStatus::InfiniteVariation,
            note: "the 1/(1-α) moment diverges at the origin",
        },
        CatalogEntry {
            name: "smooth_bump + stable(alpha=1.5)",
            model: MixedModel::single(
                NoiseComponent::jumps(1.0, stable.clone()),
                KernelPair::moving_average(Kernel::smooth_bump(-1.0, 1.0).unwrap()),
            )
            .unwrap(),
            expected: VerdictStatus::FiniteVariation,
            note: "smooth compact kernel with finite jump cost",
        },
        CatalogEntry {
            name: "indicator(0,1) + stable(alpha=1.5)",
            model: MixedModel::single(
                NoiseComponent::jumps(1.0, stable),
                KernelPair::moving_average(Kernel::indicator(0.0, 1.0).unwrap()),
            )
            .unwrap(),
            expected: VerdictStatus::InfiniteVariation,
            note: "infinite-variation noise forces absolutely continuous kernels",
        },
        CatalogEntry {
            name: "fractional(0.25) + gaussian",
            model: MixedModel::single(
                NoiseComponent::gaussian(1.0, 1.0),
                KernelPair::anchored(Kernel::fractional(0.25)),
            )
            .unwrap(),
            expected: VerdictStatus::InfiniteVariation,
            note: "the Gaussian energy integral diverges",
        },
        CatalogEntry {
            name: "indicator(0,1) + finite_atoms(±1)",
            model: MixedModel::single(
                NoiseComponent::jumps(1.0, atoms),
                KernelPair::moving_average(Kernel::indicator(0.0, 1.0).unwrap()),
            )
            .unwrap(),
            expected: VerdictStatus::Indeterminate,
            note: "finite-activity noise with a BV, non-AC kernel lies outside both theorems",
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::verdict;

    #[test]
    fn catalog_matches_expected_classification() {
        for entry in canonical_models() {
            let v = verdict(&entry.model).unwrap();
            assert_eq!(v.status, entry.expected, "{}", entry.name);
            match entry.expected {
                VerdictStatus::FiniteVariation => {
                    assert_eq!(v.justification, crate::criteria::TheoremTag::Sufficiency)
                }
                VerdictStatus::InfiniteVariation => assert!(v.justification.is_necessity()),
                VerdictStatus::Indeterminate => {
                    assert!(v.caveats.iter().any(|c| c.contains("outside both")))
                }
            }
        }
    }
}
