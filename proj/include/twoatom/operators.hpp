#pragma once

#include "types.hpp"

// Product basis |g1g2>, |e1g2>, |g1e2>, |e1e2>; superoperators act on
// column-stacked density matrices, vec(A X B) = (B^T kron A) vec(X).
namespace twoatom::ops {

inline Mat4 unit(int i, int j) {
    Mat4 m = Mat4::Zero();
    m(i, j) = 1.0;
    return m;
}

inline Mat4 lower1() { return unit(0, 1) + unit(2, 3); }
inline Mat4 lower2() { return unit(0, 2) + unit(1, 3); }
inline Mat4 raise1() { return lower1().adjoint(); }
inline Mat4 raise2() { return lower2().adjoint(); }
inline Mat4 lower(int i) { return i == 0 ? lower1() : lower2(); }
inline Mat4 raise(int i) { return i == 0 ? raise1() : raise2(); }
inline Mat4 number(int i) { return raise(i) * lower(i); }

inline Mat4 collective_lower() { return lower1() + lower2(); }
inline Mat4 collective_raise() { return raise1() + raise2(); }

inline Vec16 vec(const Mat4& m) {
    Vec16 v;
    for (int c = 0; c < 4; ++c)
        for (int r = 0; r < 4; ++r) v(4 * c + r) = m(r, c);
    return v;
}

inline Mat4 unvec(const Vec16& v) {
    Mat4 m;
    for (int c = 0; c < 4; ++c)
        for (int r = 0; r < 4; ++r) m(r, c) = v(4 * c + r);
    return m;
}

inline Mat16 kron(const Mat4& a, const Mat4& b) {
    Mat16 k;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) k.block<4, 4>(4 * i, 4 * j) = a(i, j) * b;
    return k;
}

// X -> A X B
inline Mat16 sandwich(const Mat4& a, const Mat4& b) { return kron(b.transpose(), a); }
inline Mat16 left(const Mat4& a) { return sandwich(a, Mat4::Identity()); }
inline Mat16 right(const Mat4& b) { return sandwich(Mat4::Identity(), b); }

// -i [H, .]
inline Mat16 commutator(const Mat4& h) { return -I * (left(h) - right(h)); }

// rate/2 (2 J X K - K J X - X K J)  for jump pair (J, K); K = J^dagger gives a Lindblad term
inline Mat16 dissipator(cplx rate, const Mat4& j, const Mat4& k) {
    Mat4 kj = k * j;
    return 0.5 * rate * (2.0 * sandwich(j, k) - left(kj) - right(kj));
}

inline Mat16 lindblad(double rate, const Mat4& j) { return dissipator(rate, j, j.adjoint()); }

}  // namespace twoatom::ops
