#pragma once

// Unconstrained optimizer coordinates x = [lambda~ (nt-1), theta (nt(nt-1)/2)]
// and the rectified objective f(x) = -R(r(lambda~, Pt), theta).

#include "rotaprec/channel.hpp"
#include "rotaprec/matlin.hpp"

#include <span>

namespace rotaprec {

inline Eigen::Index coordinate_count(Eigen::Index nt) { return (nt - 1) + nt * (nt - 1) / 2; }

// Clamp negatives to zero, scale down to Pt if the sum exceeds it, and append
// the remainder as the last eigenvalue. Total: never throws for finite input.
Vector rectify(const Vector& free_eigenvalues, double pt);

Vector pack(const Vector& free_eigenvalues, const GivensAngleSet& angles);

struct Unpacked {
    Vector free_eigenvalues;
    GivensAngleSet angles;
};
Unpacked unpack(const Vector& x, Eigen::Index nt);

// Optimizer coordinates of a rotation parameter set: lambda truncated to its
// first nt-1 entries.
Vector coordinates_of(const Vector& lambda, const GivensAngleSet& angles);

double objective(const Vector& x, const ChannelPair& ch, double pt);

// Bound form for passing to the optimizer.
class SecrecyObjective {
public:
    SecrecyObjective(const ChannelPair& ch, double pt) : ch_(&ch), pt_(pt) {}
    double operator()(const Vector& x) const { return objective(x, *ch_, pt_); }

private:
    const ChannelPair* ch_;
    double pt_;
};

}  // namespace rotaprec
