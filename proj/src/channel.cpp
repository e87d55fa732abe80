#include "rotaprec/channel.hpp"

#include "rotaprec/matlin.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace rotaprec {

namespace {

constexpr double kInvLn2 = 1.4426950408889634;

std::string format17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

ChannelPair::ChannelPair(Matrix h, Matrix g) : h_(std::move(h)), g_(std::move(g)) {
    if (h_.cols() != g_.cols())
        throw ArgumentError("channel: H and G must have the same number of columns (nt)");
    if (h_.cols() < 1 || h_.rows() < 1 || g_.rows() < 1)
        throw ArgumentError("channel: antenna counts must be >= 1");
    if (!h_.allFinite() || !g_.allFinite()) throw ArgumentError("channel: non-finite entries");
    hth_ = h_.transpose() * h_;
    gtg_ = g_.transpose() * g_;
}

double GaussianSource::uniform_pm1() {
    // 53 high bits -> [0, 1) exactly, then affine map to [-1, 1).
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return 2.0 * u - 1.0;
}

double GaussianSource::next() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = uniform_pm1();
        v = uniform_pm1();
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
}

ChannelPair draw_channel(Eigen::Index nt, Eigen::Index nr, Eigen::Index ne, std::uint64_t seed) {
    if (nt < 1 || nr < 1 || ne < 1) throw ArgumentError("draw_channel: counts must be >= 1");
    GaussianSource src(seed);
    Matrix h(nr, nt);
    Matrix g(ne, nt);
    for (Eigen::Index r = 0; r < nr; ++r)
        for (Eigen::Index c = 0; c < nt; ++c) h(r, c) = src.next();
    for (Eigen::Index r = 0; r < ne; ++r)
        for (Eigen::Index c = 0; c < nt; ++c) g(r, c) = src.next();
    return {std::move(h), std::move(g)};
}

double logdet_spd(const Matrix& a) {
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() != Eigen::Success) throw NumericalError("logdet_spd: matrix is not positive definite");
    const auto& l = llt.matrixLLT();
    double s = 0.0;
    for (Eigen::Index k = 0; k < a.rows(); ++k) s += std::log(l(k, k));
    return 2.0 * s;
}

namespace {

// log det(I + B^T B) = log det(I + B B^T).
double logdet_gain(const Matrix& b) {
    if (b.rows() < b.cols()) return logdet_spd(Matrix::Identity(b.rows(), b.rows()) + b * b.transpose());
    return logdet_spd(Matrix::Identity(b.cols(), b.cols()) + b.transpose() * b);
}

}  // namespace

double secrecy_rate(const ChannelPair& ch, const Matrix& v, const Vector& lambda) {
    const auto n = ch.nt();
    if (v.rows() != n || v.cols() != n || lambda.size() != n)
        throw ArgumentError("secrecy_rate: V and lambda must match nt");
    if (!v.allFinite() || !lambda.allFinite()) throw ArgumentError("secrecy_rate: non-finite input");
    if ((lambda.array() < 0.0).any()) throw ArgumentError("secrecy_rate: negative eigenvalue");

    // W = V diag(sqrt(lambda)); det(I + W^T M^T M W) for M = H, G, taken in
    // the smaller of the two equivalent dimensions.
    const Matrix w = v * lambda.cwiseSqrt().asDiagonal();
    return 0.5 * kInvLn2 * (logdet_gain(ch.legit() * w) - logdet_gain(ch.eve() * w));
}

double secrecy_rate_q(const ChannelPair& ch, const Matrix& q) {
    if (q.rows() != ch.nt() || q.cols() != ch.nt()) throw ArgumentError("secrecy_rate_q: Q must be nt x nt");
    if (!q.allFinite()) throw ArgumentError("secrecy_rate_q: non-finite Q");
    const double scale = std::max(1.0, max_abs(q));
    if (symmetry_error(q) > 1e-9 * scale) throw ArgumentError("secrecy_rate_q: Q is not symmetric");
    const Matrix qs = 0.5 * (q + q.transpose());
    if (sym_eig(qs).values.minCoeff() < -1e-6)
        throw ArgumentError("secrecy_rate_q: Q is not positive semidefinite");

    const Matrix& h = ch.legit();
    const Matrix& g = ch.eve();
    const Matrix legit = Matrix::Identity(h.rows(), h.rows()) + h * qs * h.transpose();
    const Matrix eve = Matrix::Identity(g.rows(), g.rows()) + g * qs * g.transpose();
    return 0.5 * kInvLn2 * (logdet_spd(legit) - logdet_spd(eve));
}

namespace {

Matrix matrix_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data"))
        throw ArgumentError("matrix json: expected {rows, cols, data}");
    const auto rows = j.at("rows").get<long long>();
    const auto cols = j.at("cols").get<long long>();
    const auto& data = j.at("data");
    if (rows < 1 || cols < 1 || !data.is_array() || static_cast<long long>(data.size()) != rows * cols)
        throw ArgumentError("matrix json: data length does not match rows*cols");
    Matrix m(rows, cols);
    for (long long r = 0; r < rows; ++r)
        for (long long c = 0; c < cols; ++c) {
            const auto& x = data[static_cast<std::size_t>(r * cols + c)];
            if (!x.is_number()) throw ArgumentError("matrix json: non-numeric entry");
            m(r, c) = x.get<double>();
        }
    return m;
}

}  // namespace

Matrix parse_matrix_json(const std::string& text) {
    try {
        return matrix_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(std::string("matrix json: ") + e.what());
    }
}

Matrix parse_matrix_csv(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
                if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw ArgumentError("matrix csv: cannot parse '" + cell + "'");
            }
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ArgumentError("matrix csv: ragged rows");
        rows.push_back(std::move(row));
    }
    if (rows.empty() || rows.front().empty()) throw ArgumentError("matrix csv: empty matrix");
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    return m;
}

std::string matrix_to_json(const Matrix& m) {
    std::string s = "{\"rows\": " + std::to_string(m.rows()) + ", \"cols\": " + std::to_string(m.cols()) +
                    ", \"data\": [";
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (r != 0 || c != 0) s += ", ";
            s += format17(m(r, c));
        }
    s += "]}";
    return s;
}

std::string matrix_to_csv(const Matrix& m) {
    std::string s;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) s += ',';
            s += format17(m(r, c));
        }
        s += '\n';
    }
    return s;
}

Matrix read_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open matrix file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') return parse_matrix_json(text);
    return parse_matrix_csv(text);
}

void write_matrix(const std::string& path, const Matrix& m) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write matrix file '" + path + "'");
    const bool csv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
    out << (csv ? matrix_to_csv(m) : matrix_to_json(m) + "\n");
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace rotaprec
