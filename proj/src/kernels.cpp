#include "tildeq/kernels.hpp"

// Runtime ISA selection. Detection happens once; the chosen table is then
// immutable for the process lifetime.

namespace tildeq::kernels {

const Ops* detail_avx2_table(); // defined in kernels_avx2.cpp

namespace {

bool host_has_avx2_fma() {
#if (defined(__x86_64__) || defined(_M_X64)) && defined(__GNUC__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

struct Selection {
    const Ops* table;
    const char* isa;
};

const Selection& selection() {
    static const Selection sel = [] {
        const Ops* t = detail_avx2_table();
        if (t != nullptr && host_has_avx2_fma()) return Selection{t, "avx2"};
        return Selection{&scalar_ops(), "scalar"};
    }();
    return sel;
}

} // namespace

const Ops& ops() { return *selection().table; }

const char* active_isa() { return selection().isa; }

const Ops* avx2_ops() {
    const Ops* t = detail_avx2_table();
    return (t != nullptr && host_has_avx2_fma()) ? t : nullptr;
}

} // namespace tildeq::kernels
