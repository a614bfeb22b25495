#include "sketchla/fwht.hh"

#include "sketchla/errors.hh"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <string>
#include <vector>

namespace sketchla {

namespace {

struct Stage {
    std::size_t stride;
    int radix;
    std::size_t span() const { return stride * static_cast<std::size_t>(radix); }
};

std::vector<Stage> stages_of(const FwhtPlan& plan) {
    std::vector<Stage> out;
    std::size_t stride = plan.d / 4;
    for (; stride >= 1 && stride * 4 <= plan.d; stride /= 4) {
        out.push_back({stride, 4});
        if (stride == 1)
            break;
    }
    if (plan.remainder_radix == 2)
        out.push_back({1, 2});
    return out;
}

inline void radix4(double* a, std::size_t i0, std::size_t stride) {
    const std::size_t i1 = i0 + stride, i2 = i1 + stride, i3 = i2 + stride;
    const double x = a[i0], y = a[i1], z = a[i2], t = a[i3];
    const double xp = x + z, yp = y + t, zm = x - z, tm = y - t;
    a[i0] = xp + yp;
    a[i1] = xp - yp;
    a[i2] = zm + tm;
    a[i3] = zm - tm;
}

inline void radix2(double* a, std::size_t i0, std::size_t stride) {
    const double x = a[i0], y = a[i0 + stride];
    a[i0] = x + y;
    a[i0 + stride] = x - y;
}

// One stage over `len` entries starting at a.
void run_stage(double* a, std::size_t len, const Stage& st, bool parallel) {
    const std::size_t span = st.span();
    const std::int64_t butterflies = static_cast<std::int64_t>(len / static_cast<std::size_t>(st.radix));
#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t q = 0; q < butterflies; ++q) {
        const std::size_t uq = static_cast<std::size_t>(q);
        const std::size_t base = (uq / st.stride) * span;
        const std::size_t i0 = base + uq % st.stride;
        if (st.radix == 4)
            radix4(a, i0, st.stride);
        else
            radix2(a, i0, st.stride);
    }
}

}  // namespace

FwhtPlan make_fwht_plan(std::size_t d, std::size_t block_threshold) {
    if (d < 2 || !std::has_single_bit(d))
        throw ShapeError("fwht: length " + std::to_string(d) + " is not a power of two >= 2");
    FwhtPlan plan;
    plan.d = d;
    std::size_t b = std::max<std::size_t>(block_threshold, 4);
    b = std::bit_floor(b);
    plan.block_threshold = std::min(b, d);
    plan.remainder_radix = (std::countr_zero(d) % 2 == 1) ? 2 : 4;
    return plan;
}

std::size_t fwht_global_stages(const FwhtPlan& plan) {
    std::size_t count = 0;
    for (const Stage& st : stages_of(plan))
        if (st.span() > plan.block_threshold)
            ++count;
    return count;
}

FwhtTraffic fwht_expected_traffic(const FwhtPlan& plan) {
    const std::uint64_t passes = fwht_global_stages(plan) + 1;
    return {passes * plan.d, passes * plan.d};
}

void fwht_inplace(std::span<double> a, const FwhtPlan& plan, FwhtTraffic* traffic) {
    if (a.size() != plan.d)
        throw ShapeError("fwht: vector length " + std::to_string(a.size()) +
                         " does not match plan length " + std::to_string(plan.d));
    const auto stages = stages_of(plan);
    const std::size_t block = plan.block_threshold;
    const bool parallel = !omp_in_parallel() && omp_get_max_threads() > 1 && plan.d >= (1u << 14);

    std::size_t first_local = 0;
    while (first_local < stages.size() && stages[first_local].span() > block) {
        run_stage(a.data(), plan.d, stages[first_local], parallel);
        if (traffic) {
            traffic->reads += plan.d;
            traffic->writes += plan.d;
        }
        ++first_local;
    }
    if (first_local == stages.size())
        return;

    const std::int64_t blocks = static_cast<std::int64_t>(plan.d / block);
#pragma omp parallel if (parallel)
    {
        std::vector<double> local(block);
#pragma omp for schedule(static)
        for (std::int64_t bi = 0; bi < blocks; ++bi) {
            double* home = a.data() + static_cast<std::size_t>(bi) * block;
            std::copy(home, home + block, local.begin());
            for (std::size_t s = first_local; s < stages.size(); ++s)
                run_stage(local.data(), block, stages[s], false);
            std::copy(local.begin(), local.end(), home);
        }
    }
    if (traffic) {
        traffic->reads += plan.d;
        traffic->writes += plan.d;
    }
}

void fwht_inplace(Vector& a, const FwhtPlan& plan, FwhtTraffic* traffic) {
    fwht_inplace(a.span(), plan, traffic);
}

void fwht_matrix(DenseMatrix& a, const FwhtPlan& plan, FwhtTraffic* traffic) {
    if (a.layout() != Layout::ColMajor)
        throw LayoutError("fwht_matrix: expected a column-major matrix");
    if (a.rows() != plan.d)
        throw ShapeError("fwht_matrix: rows " + std::to_string(a.rows()) +
                         " do not match plan length " + std::to_string(plan.d));
    const std::int64_t n = static_cast<std::int64_t>(a.cols());
    const bool across_columns = n > 1 && omp_get_max_threads() > 1;
#pragma omp parallel for schedule(dynamic) if (across_columns)
    for (std::int64_t j = 0; j < n; ++j)
        fwht_inplace(a.major_slice(static_cast<std::size_t>(j)), plan, nullptr);
    if (traffic) {
        const FwhtTraffic per = fwht_expected_traffic(plan);
        traffic->reads += per.reads * a.cols();
        traffic->writes += per.writes * a.cols();
    }
}

}  // namespace sketchla
