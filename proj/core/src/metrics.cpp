#include "segbench/metrics.hpp"

#include "segbench/error.hpp"
#include "segbench/interaction.hpp"

namespace segbench::metrics {
namespace {

void require_same_shape(const BinaryMask& a, const BinaryMask& b) {
  if (!a.same_shape(b)) {
    throw Error(ErrorCode::DimensionMismatch, std::to_string(a.width()) + "x" + std::to_string(a.height()) + " vs " +
                                                  std::to_string(b.width()) + "x" + std::to_string(b.height()));
  }
}

}  // namespace

double iou(const BinaryMask& gt, const BinaryMask& pred) {
  require_same_shape(gt, pred);
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    inter += gt[i] & pred[i];
    uni += gt[i] | pred[i];
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double iou_improvement(const SessionRecord& record) {
  if (record.masks.empty()) throw Error(ErrorCode::EmptyRecord, "session record has no masks");
  return record.refined_iou - record.initial_iou;
}

AlphaBeta alpha_beta(const BinaryMask& gt, const BinaryMask& pred) {
  require_same_shape(gt, pred);
  const std::size_t gt_area = gt.count();
  if (gt_area == 0) throw Error(ErrorCode::EmptyGroundTruth, "alpha/beta need a nonempty ground truth");
  std::size_t uni = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) uni += gt[i] | pred[i];
  const double g = static_cast<double>(gt_area);
  return {static_cast<double>(uni) / g, static_cast<double>(pred.count()) / g};
}

}  // namespace segbench::metrics
