#include "tqn/losses.hpp"

#include <stdexcept>

namespace tqn {

namespace {

void check_shapes(const TripletFeatures& t, const char* op) {
    if (!t.fa.same_shape(t.fp) || !t.fa.same_shape(t.fn)) {
        throw std::invalid_argument(std::string(op) + ": anchor/positive/negative shapes differ");
    }
    if (t.batch_size() == 0) throw std::invalid_argument(std::string(op) + ": empty batch");
}

LossResult zero_result(const TripletFeatures& t) {
    const Matrix zeros(t.batch_size(), t.bits());
    return {0.0, zeros, zeros, zeros};
}

}  // namespace

LossResult triplet_loss(const TripletFeatures& t, double alpha) {
    check_shapes(t, "triplet_loss");
    if (alpha < 0.0) throw std::invalid_argument("triplet_loss: margin must be non-negative");

    const std::size_t bs = t.batch_size();
    const double inv_bs = 1.0 / static_cast<double>(bs);
    LossResult out = zero_result(t);
    for (std::size_t i = 0; i < bs; ++i) {
        const auto a = t.fa.row(i), p = t.fp.row(i), n = t.fn.row(i);
        double pos = 0.0, neg = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) {
            pos += (a[j] - p[j]) * (a[j] - p[j]);
            neg += (a[j] - n[j]) * (a[j] - n[j]);
        }
        const double hinge = alpha + pos - neg;
        if (hinge <= 0.0) continue;
        out.value += hinge;
        for (std::size_t j = 0; j < a.size(); ++j) {
            out.grad_a(i, j) = (n[j] - p[j]) * inv_bs;
            out.grad_p(i, j) = (p[j] - a[j]) * inv_bs;
            out.grad_n(i, j) = (a[j] - n[j]) * inv_bs;
        }
    }
    out.value *= 0.5 * inv_bs;
    return out;
}

LossResult similar_loss(const TripletFeatures& t, double alpha_s) {
    check_shapes(t, "similar_loss");
    if (alpha_s < 0.0 || alpha_s > 0.25) {
        throw std::invalid_argument("similar_loss: alpha_s must lie in [0, 0.25]");
    }

    const std::size_t bs = t.batch_size();
    const double inv_bs = 1.0 / static_cast<double>(bs);
    LossResult out = zero_result(t);
    for (std::size_t i = 0; i < bs; ++i) {
        const auto a = t.fa.row(i), p = t.fp.row(i);
        for (std::size_t j = 0; j < a.size(); ++j) {
            const double hinge = alpha_s - (a[j] - 0.5) * (p[j] - 0.5);
            if (hinge <= 0.0) continue;
            out.value += hinge;
            out.grad_a(i, j) = (0.5 - p[j]) * inv_bs;
            out.grad_p(i, j) = (0.5 - a[j]) * inv_bs;
        }
    }
    out.value *= inv_bs;
    return out;
}

LossResult dissimilar_loss(const TripletFeatures& t, double alpha_d, double delta) {
    check_shapes(t, "dissimilar_loss");
    if (!(alpha_d > 0.0)) throw std::invalid_argument("dissimilar_loss: alpha_d must be positive");
    if (!(delta > 0.0)) throw std::invalid_argument("dissimilar_loss: delta must be positive");

    const std::size_t bs = t.batch_size();
    const double inv_bs = 1.0 / static_cast<double>(bs);
    LossResult out = zero_result(t);
    for (std::size_t i = 0; i < bs; ++i) {
        const auto a = t.fa.row(i), n = t.fn.row(i);
        double clamped = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) {
            const double d = a[j] - n[j];
            clamped += std::min(d * d, delta);
        }
        const double hinge = alpha_d - clamped;
        if (hinge <= 0.0) continue;
        out.value += hinge;
        for (std::size_t j = 0; j < a.size(); ++j) {
            const double d = a[j] - n[j];
            // clamped dimensions contribute a constant
            if (d * d >= delta) continue;
            out.grad_a(i, j) = -d * inv_bs;
            out.grad_n(i, j) = d * inv_bs;
        }
    }
    out.value *= 0.5 * inv_bs;
    return out;
}

LossResult tqn_loss(const TripletFeatures& t, const TqnWeights& w) {
    if (w.beta < 0.0 || w.gamma < 0.0) {
        throw std::invalid_argument("tqn_loss: beta and gamma must be non-negative");
    }
    const LossResult s = similar_loss(t, w.alpha_s);
    const LossResult d = dissimilar_loss(t, w.alpha_d, w.delta);

    LossResult out = zero_result(t);
    out.value = w.beta * s.value + w.gamma * d.value;
    for (std::size_t k = 0; k < out.grad_a.size(); ++k) {
        out.grad_a.data()[k] = w.beta * s.grad_a.data()[k] + w.gamma * d.grad_a.data()[k];
        out.grad_p.data()[k] = w.beta * s.grad_p.data()[k] + w.gamma * d.grad_p.data()[k];
        out.grad_n.data()[k] = w.beta * s.grad_n.data()[k] + w.gamma * d.grad_n.data()[k];
    }
    return out;
}

}  // namespace tqn
