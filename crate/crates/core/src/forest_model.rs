//! Age-class forest state and its one-stage dynamics.
//!
//! Age classes are numbered `1..=L` in every public signature and error
//! message; storage is zero-based.

use thiserror::Error;

/// Harvests may exceed the standing stock by at most this much before
/// [`managed_step`] rejects them. The excess is clamped away.
pub const HARVEST_TOLERANCE: f64 = 1e-8;

const COLUMN_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ForestError {
    #[error("dimension mismatch: expected {expected} age classes, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{what} must have at least one age class")]
    Empty { what: &'static str },
    #[error("{what} in age class {age_class} is {value}, must be a finite value >= 0")]
    InvalidValue {
        what: &'static str,
        age_class: usize,
        value: f64,
    },
    #[error("survival fraction for age class {age_class} is {value}, must lie in [0, 1]")]
    InvalidSurvival { age_class: usize, value: f64 },
    #[error("transition matrix must be square, row {row} has {found} entries for order {order}")]
    NotSquare {
        order: usize,
        row: usize,
        found: usize,
    },
    #[error("transition matrix column {column} sums to {sum}, exceeding 1")]
    ColumnCreatesArea { column: usize, sum: f64 },
    #[error(
        "harvest exceeds stock in age class {age_class} (harvest {harvest}, available {available})"
    )]
    HarvestExceedsStock {
        age_class: usize,
        harvest: f64,
        available: f64,
    },
    #[error(
        "harvest of {value} in age class {age_class} is below the minimal harvesting age {min_age}"
    )]
    HarvestTooYoung {
        age_class: usize,
        value: f64,
        min_age: usize,
    },
    #[error(
        "planting of {value} in age class {age_class} is above the maximal planting age {max_age}"
    )]
    PlantingTooOld {
        age_class: usize,
        value: f64,
        max_age: usize,
    },
}

fn check_nonnegative(what: &'static str, values: &[f64]) -> Result<(), ForestError> {
    match values
        .iter()
        .enumerate()
        .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
    {
        Some((i, &value)) => Err(ForestError::InvalidValue {
            what,
            age_class: i + 1,
            value,
        }),
        None => Ok(()),
    }
}

fn check_len(expected: usize, found: usize) -> Result<(), ForestError> {
    if expected == found {
        Ok(())
    } else {
        Err(ForestError::DimensionMismatch { expected, found })
    }
}

/// Forested area (hectares) per age class at the end of one stage.
#[derive(Debug, Clone, PartialEq)]
pub struct ForestState {
    areas: Vec<f64>,
}

impl ForestState {
    pub fn new(areas: Vec<f64>) -> Result<Self, ForestError> {
        if areas.is_empty() {
            return Err(ForestError::Empty {
                what: "forest state",
            });
        }
        check_nonnegative("area", &areas)?;
        Ok(Self { areas })
    }

    pub fn zeros(age_classes: usize) -> Self {
        Self {
            areas: vec![0.0; age_classes],
        }
    }

    pub fn areas(&self) -> &[f64] {
        &self.areas
    }

    pub fn age_classes(&self) -> usize {
        self.areas.len()
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }

    /// Area in age class `age` (1-based).
    pub fn area(&self, age: usize) -> f64 {
        self.areas[age - 1]
    }

    pub fn into_areas(self) -> Vec<f64> {
        self.areas
    }
}

/// The nonnegative matrix `A` that ages the forest by one stage when nothing
/// is harvested or planted.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionOperator {
    order: usize,
    // row-major, order x order
    entries: Vec<f64>,
}

impl TransitionOperator {
    /// Aging shift: class `i` moves to class `i + 1` with fraction
    /// `survival[i]`, and the oldest class stays where it is with fraction
    /// `survival[L]`.
    pub fn aging(survival: &[f64]) -> Result<Self, ForestError> {
        let order = survival.len();
        if order == 0 {
            return Err(ForestError::Empty {
                what: "survival vector",
            });
        }
        if let Some((i, &value)) = survival
            .iter()
            .enumerate()
            .find(|(_, s)| !(0.0..=1.0).contains(*s))
        {
            return Err(ForestError::InvalidSurvival {
                age_class: i + 1,
                value,
            });
        }
        let mut entries = vec![0.0; order * order];
        for col in 0..order - 1 {
            entries[(col + 1) * order + col] = survival[col];
        }
        entries[order * order - 1] = survival[order - 1];
        Ok(Self { order, entries })
    }

    /// Aging shift where every class survives completely.
    pub fn lossless_aging(order: usize) -> Result<Self, ForestError> {
        Self::aging(&vec![1.0; order])
    }

    pub fn identity(order: usize) -> Result<Self, ForestError> {
        let rows = (0..order)
            .map(|r| (0..order).map(|c| if r == c { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::from_rows(rows)
    }

    /// Accepts any square nonnegative matrix whose columns each sum to at
    /// most one.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, ForestError> {
        let order = rows.len();
        if order == 0 {
            return Err(ForestError::Empty {
                what: "transition matrix",
            });
        }
        let mut entries = Vec::with_capacity(order * order);
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != order {
                return Err(ForestError::NotSquare {
                    order,
                    row: r + 1,
                    found: row.len(),
                });
            }
            check_nonnegative("transition entry", &row)?;
            entries.extend(row);
        }
        for col in 0..order {
            let sum: f64 = (0..order).map(|r| entries[r * order + col]).sum();
            if sum > 1.0 + COLUMN_SUM_TOLERANCE {
                return Err(ForestError::ColumnCreatesArea {
                    column: col + 1,
                    sum,
                });
            }
        }
        Ok(Self { order, entries })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Entry of row `to`, column `from`, both 1-based: the fraction of age
    /// class `from` that ends up in class `to` after one stage.
    pub fn entry(&self, to: usize, from: usize) -> f64 {
        self.entries[(to - 1) * self.order + (from - 1)]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks(self.order)
    }

    /// Matrix-vector product without any dimension checks beyond a debug
    /// assertion.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.order);
        self.rows()
            .map(|row| row.iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }
}

/// Harvested and planted area per age class within one stage.
#[derive(Debug, Clone, PartialEq)]
pub struct ManagementAction {
    harvest: Vec<f64>,
    plant: Vec<f64>,
}

impl ManagementAction {
    /// `min_harvest_age` is the youngest class that may be harvested,
    /// `max_planting_age` the oldest class that may be planted.
    pub fn new(
        harvest: Vec<f64>,
        plant: Vec<f64>,
        min_harvest_age: usize,
        max_planting_age: usize,
    ) -> Result<Self, ForestError> {
        check_len(harvest.len(), plant.len())?;
        check_nonnegative("harvest", &harvest)?;
        check_nonnegative("planting", &plant)?;
        if let Some((i, &value)) = harvest
            .iter()
            .enumerate()
            .take(min_harvest_age.saturating_sub(1))
            .find(|(_, u)| **u != 0.0)
        {
            return Err(ForestError::HarvestTooYoung {
                age_class: i + 1,
                value,
                min_age: min_harvest_age,
            });
        }
        if let Some((i, &value)) = plant
            .iter()
            .enumerate()
            .skip(max_planting_age)
            .find(|(_, w)| **w != 0.0)
        {
            return Err(ForestError::PlantingTooOld {
                age_class: i + 1,
                value,
                max_age: max_planting_age,
            });
        }
        Ok(Self { harvest, plant })
    }

    pub fn none(age_classes: usize) -> Self {
        Self {
            harvest: vec![0.0; age_classes],
            plant: vec![0.0; age_classes],
        }
    }

    pub fn harvest(&self) -> &[f64] {
        &self.harvest
    }

    pub fn plant(&self) -> &[f64] {
        &self.plant
    }

    pub fn age_classes(&self) -> usize {
        self.harvest.len()
    }
}

/// `A v`: one stage of growth with no intervention.
pub fn natural_step(
    state: &ForestState,
    op: &TransitionOperator,
) -> Result<ForestState, ForestError> {
    check_len(op.order(), state.age_classes())?;
    Ok(ForestState {
        areas: op.apply(state.areas()),
    })
}

/// `A (v - u) + w`: harvest first, let the remainder age, then plant.
pub fn managed_step(
    state: &ForestState,
    action: &ManagementAction,
    op: &TransitionOperator,
) -> Result<ForestState, ForestError> {
    check_len(op.order(), state.age_classes())?;
    check_len(op.order(), action.age_classes())?;
    let mut remaining = Vec::with_capacity(op.order());
    for (i, (&v, &u)) in state.areas().iter().zip(action.harvest()).enumerate() {
        if u > v + HARVEST_TOLERANCE {
            return Err(ForestError::HarvestExceedsStock {
                age_class: i + 1,
                harvest: u,
                available: v,
            });
        }
        remaining.push((v - u).max(0.0));
    }
    let areas = op
        .apply(&remaining)
        .into_iter()
        .zip(action.plant())
        .map(|(aged, w)| aged + w)
        .collect();
    Ok(ForestState { areas })
}
