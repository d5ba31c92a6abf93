#pragma once

#include "lambdaforge/constructions.hpp"
#include "lambdaforge/io.hpp"

namespace lf::testutil {

inline LcaSpec virasoro() {
    GeneratorDecl L;
    L.id = "L";
    L.delta = 2;
    L.zeta = 2;
    Lambda1 l;
    l.add(0, Expr::single(Monomial{{Term{0, 1}}}));
    l.add(1, Expr::gen(0, Scalar(2)));
    l.add(3, Expr::vacuum(Scalar::param("c") * Scalar(Rat(1, 12))));
    std::map<std::pair<int, int>, Lambda1> table;
    table.emplace(std::make_pair(0, 0), l);
    return LcaSpec(GenSet({L}), std::move(table), true, "virasoro");
}

inline LcaSpec cur_sl2() { return cur(make_sl2(), Scalar::param("k")); }
inline LcaSpec cur_sl3() { return cur(make_sl3(), Scalar::param("k")); }

/// one odd charged pair (ph, ps) with [ph lam ps] = |0>, weights 1/2
inline LcaSpec charged_pair() {
    return fermion_charged({ChargedPair{"1", Parity::Odd, Rat(1, 2)}});
}

/// one odd neutral pair with <A|B> = <B|A> = 1
inline LcaSpec neutral_pair() {
    Mat p(2, 2);
    p.at(0, 1) = Scalar(1);
    p.at(1, 0) = Scalar(1);
    return fermion_neutral({"A", "B"}, {Parity::Odd, Parity::Odd}, p);
}

/// deterministic linear congruential values for seed-pinned property tests
struct Rng {
    unsigned s;
    explicit Rng(unsigned seed) : s(seed) {}
    unsigned next() { return s = s * 1664525u + 1013904223u; }
    long below(long n) { return (long)(next() % (unsigned)n); }
};

} // namespace lf::testutil
