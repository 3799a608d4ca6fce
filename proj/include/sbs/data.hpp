#pragma once

#include "sbs/types.hpp"

namespace sbs {

/// Returns the dataset unchanged iff every structural invariant holds:
/// matching dimensions across models, finite values, unique predictor names,
/// and no constant (zero-variance) predictor column.
PanelDataset validate_dataset(PanelDataset raw);

/// Pairs (p, s), p < s, whose sample Pearson correlation exceeds rho in at
/// least one of the M models.
std::vector<IndexPair> build_hc_set(const PanelDataset& data, double rho);

/// Exponential smoothing: out[0] = x[0], out[t] = a*x[t] + (1-a)*out[t-1].
VectorXd exp_smooth(const VectorXd& series, double alpha);

/// Appends one smoothed copy of column `base_predictor` per alpha to every
/// model's predictor matrix; returns the new dataset together with the
/// appended column indices, to be registered as a transformation group.
std::pair<PanelDataset, IndexSet> expand_transform_grid(
    const PanelDataset& data, int base_predictor, const std::vector<double>& alphas);

}  // namespace sbs
