#pragma once

#include "tqn/linalg.hpp"

namespace tqn {

/// Latent-layer outputs for a batch of triplets; row i of each matrix is triplet i.
struct TripletFeatures {
    Matrix fa;
    Matrix fp;
    Matrix fn;

    std::size_t batch_size() const { return fa.rows(); }
    std::size_t bits() const { return fa.cols(); }
};

/// Loss value with its gradients with respect to each role's features.
struct LossResult {
    double value = 0.0;
    Matrix grad_a;
    Matrix grad_p;
    Matrix grad_n;
};

/// Margin triplet loss (1/2bs)·Σ max(α + ‖fa−fp‖² − ‖fa−fn‖², 0).
LossResult triplet_loss(const TripletFeatures& t, double alpha);

/// Similar-pair quantization loss (1/bs)·ΣᵢΣⱼ max(α_s − (faⱼ−½)(fpⱼ−½), 0).
/// Pushes anchor and positive to the same side of the 0.5 threshold in every bit.
LossResult similar_loss(const TripletFeatures& t, double alpha_s);

/// Dissimilar-pair loss (1/2bs)·Σ max(α_d − Σⱼ min(|faⱼ−fnⱼ|², δ), 0).
LossResult dissimilar_loss(const TripletFeatures& t, double alpha_d, double delta);

struct TqnWeights {
    double beta = 8.0;
    double gamma = 1.0;
    double alpha_s = 0.16;
    double alpha_d = 0.0;
    double delta = 0.64;
};

/// Triplet quantization loss β·L_s + γ·L_d.
LossResult tqn_loss(const TripletFeatures& t, const TqnWeights& w);

}  // namespace tqn
