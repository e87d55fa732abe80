#include "rotaprec/rectifier.hpp"

#include <sstream>

namespace rotaprec {

Vector rectify(const Vector& free_eigenvalues, double pt) {
    const auto k = free_eigenvalues.size();
    Vector out(k + 1);
    out.head(k) = free_eigenvalues.cwiseMax(0.0);
    const double sum = out.head(k).sum();
    // sum > pt >= 0 implies sum > 0, so the division is safe.
    if (sum > pt) out.head(k) *= pt / sum;
    out(k) = std::max(0.0, pt - out.head(k).sum());
    return out;
}

Vector pack(const Vector& free_eigenvalues, const GivensAngleSet& angles) {
    const auto nt = static_cast<Eigen::Index>(angles.dimension());
    if (free_eigenvalues.size() != nt - 1) throw ArgumentError("pack: expected nt-1 free eigenvalues");
    Vector x(coordinate_count(nt));
    x.head(nt - 1) = free_eigenvalues;
    const auto flat = angles.flat();
    for (std::size_t i = 0; i < flat.size(); ++i) x(nt - 1 + static_cast<Eigen::Index>(i)) = flat[i];
    return x;
}

Unpacked unpack(const Vector& x, Eigen::Index nt) {
    if (nt < 1 || x.size() != coordinate_count(nt)) {
        std::ostringstream os;
        os << "unpack: coordinate vector of length " << x.size() << " does not match nt=" << nt;
        throw ArgumentError(os.str());
    }
    const auto tail = x.tail(x.size() - (nt - 1));
    return {x.head(nt - 1), GivensAngleSet(static_cast<std::size_t>(nt),
                                           std::vector<double>(tail.data(), tail.data() + tail.size()))};
}

Vector coordinates_of(const Vector& lambda, const GivensAngleSet& angles) {
    return pack(lambda.head(lambda.size() - 1), angles);
}

double objective(const Vector& x, const ChannelPair& ch, double pt) {
    const Unpacked u = unpack(x, ch.nt());
    return -secrecy_rate(ch, compose_rotation(u.angles), rectify(u.free_eigenvalues, pt));
}

}  // namespace rotaprec
