#pragma once

#include <cstdint>
#include <vector>

namespace mgmatte {

// Scalar-multiply accounting, split by what the multiplies were spent on.
// "smooth" is the unit the v-cycle work analysis is stated in (one full-grid
// relaxation sweep = one unit), so it is kept separate from residual spmv
// and transfer-stencil work.
enum class WorkKind { smooth, spmv, transfer, coarse_solve, vec };

struct WorkCounters {
    std::uint64_t smooth = 0;
    std::uint64_t spmv = 0;
    std::uint64_t transfer = 0;
    std::uint64_t coarse_solve = 0;
    std::uint64_t vec = 0;

    std::uint64_t total() const { return smooth + spmv + transfer + coarse_solve + vec; }

    void add(WorkKind kind, std::uint64_t n) {
        switch (kind) {
            case WorkKind::smooth: smooth += n; break;
            case WorkKind::spmv: spmv += n; break;
            case WorkKind::transfer: transfer += n; break;
            case WorkKind::coarse_solve: coarse_solve += n; break;
            case WorkKind::vec: vec += n; break;
        }
    }
};

namespace detail {
inline std::vector<WorkCounters*>& work_stack() {
    thread_local std::vector<WorkCounters*> stack;
    return stack;
}
}  // namespace detail

// Counts are tallied once per operation from the calling thread (computed
// arithmetically, never incremented inside inner loops), so attaching a
// tally costs nothing measurable and parallel kernels stay exact.
inline void tally_work(WorkKind kind, std::uint64_t n) {
    for (WorkCounters* c : detail::work_stack()) c->add(kind, n);
}

class ScopedWorkTally {
public:
    explicit ScopedWorkTally(WorkCounters& counters) { detail::work_stack().push_back(&counters); }
    ~ScopedWorkTally() { detail::work_stack().pop_back(); }
    ScopedWorkTally(const ScopedWorkTally&) = delete;
    ScopedWorkTally& operator=(const ScopedWorkTally&) = delete;
};

}  // namespace mgmatte
