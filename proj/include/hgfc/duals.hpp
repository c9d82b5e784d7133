#ifndef HGFC_DUALS_HPP
#define HGFC_DUALS_HPP

#include <cstdint>
#include <map>
#include <vector>

namespace hgfc {

// Slot-indexed dual solution for the scheduling LPs: one alpha per job,
// one beta per (machine, slot), and the speed-augmentation parameter used
// when evaluating the slower dual objective.
struct DualSolution {
  double delta = 1.0;
  double epsilon = 0.0;
  std::map<int, double> alpha;            // job id -> alpha_j
  std::vector<std::vector<double>> beta;  // [machine][slot]

  double beta_at(int machine, std::int64_t slot) const {
    if (machine < 0 || machine >= int(beta.size())) return 0.0;
    if (slot < 0 || slot >= std::int64_t(beta[machine].size())) return 0.0;
    return beta[machine][slot];
  }
};

struct Violation {
  int machine = 0;
  int job_id = 0;
  std::int64_t slot = 0;
  double slack = 0.0;  // negative means violated
};

}  // namespace hgfc

#endif
