#include "stmos/net/loss.hpp"

#include <cmath>

namespace stmos {

namespace {
constexpr double kEps = 1e-7;
}

template <class Scalar>
BceResult<Scalar> bce_loss(std::span<const Scalar> confidences,
                           std::span<const std::uint8_t> labels,
                           std::span<const std::uint8_t> ignore_mask) {
  if (confidences.size() != labels.size() || confidences.size() != ignore_mask.size())
    throw ArgumentError("bce_loss: confidences, labels and ignore mask must align");

  BceResult<Scalar> out;
  out.grad.assign(confidences.size(), Scalar(0));
  std::size_t counted = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < confidences.size(); ++i) {
    if (ignore_mask[i]) continue;
    ++counted;
    const double raw = static_cast<double>(confidences[i]);
    const double c = std::min(1.0 - kEps, std::max(kEps, raw));
    const double y = labels[i] ? 1.0 : 0.0;
    sum += -(y * std::log(c) + (1.0 - y) * std::log(1.0 - c));
    // clamp has zero slope outside its interval
    if (raw >= kEps && raw <= 1.0 - kEps)
      out.grad[i] = static_cast<Scalar>(-y / c + (1.0 - y) / (1.0 - c));
  }
  if (counted == 0) return out;  // defined as zero loss, zero grad
  out.loss = sum / static_cast<double>(counted);
  const Scalar inv_n = Scalar(1) / static_cast<Scalar>(counted);
  for (auto& g : out.grad) g *= inv_n;
  return out;
}

template <class Scalar>
BceResult<Scalar> bce_loss(std::span<const Scalar> confidences,
                           std::span<const PointClass> labels) {
  std::vector<std::uint8_t> y(labels.size()), ign(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    y[i] = labels[i] == PointClass::Moving ? 1 : 0;
    ign[i] = labels[i] == PointClass::Ignore ? 1 : 0;
  }
  return bce_loss<Scalar>(confidences, y, ign);
}

template BceResult<float> bce_loss<float>(std::span<const float>, std::span<const std::uint8_t>,
                                          std::span<const std::uint8_t>);
template BceResult<double> bce_loss<double>(std::span<const double>, std::span<const std::uint8_t>,
                                            std::span<const std::uint8_t>);
template BceResult<float> bce_loss<float>(std::span<const float>, std::span<const PointClass>);
template BceResult<double> bce_loss<double>(std::span<const double>, std::span<const PointClass>);

}  // namespace stmos
