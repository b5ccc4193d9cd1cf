#include "resobs/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "resobs/config.hpp"
#include "resobs/errors.hpp"

namespace resobs {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

double parse_number(const std::string& s) {
    if (s == "inf") {
        return INFINITY;
    }
    if (s == "-inf") {
        return -INFINITY;
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw ParameterError("malformed number '" + s + "'");
    }
    return v;
}

long long parse_index(const std::string& s) {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || v < 0) {
        throw ParameterError("malformed index '" + s + "'");
    }
    return v;
}

std::string read_line(std::istream& in, const char* what) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ParameterError(std::string("unexpected end of input reading ") + what);
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    return line;
}

void write_to(const std::filesystem::path& path, const auto& writer) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    writer(out);
    if (!out) {
        throw std::runtime_error("failed writing " + path.string());
    }
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return in;
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        out += (i ? "," : "") + items[i];
    }
    return out;
}

} // namespace

std::string format_double(double v, int digits) {
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto [ptr, ec] =
        std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, digits);
    return std::string(buf, ptr);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
    out << "t";
    for (const auto& name : trajectory.channels()) {
        out << ',' << name;
    }
    out << '\n';
    const auto& s = trajectory.samples();
    for (std::size_t i = 0; i < trajectory.num_steps(); ++i) {
        out << format_double(trajectory.time(i));
        for (Eigen::Index j = 0; j < s.cols(); ++j) {
            out << ',' << format_double(s(static_cast<Eigen::Index>(i), j));
        }
        out << '\n';
    }
}

Trajectory read_trajectory_csv(std::istream& in) {
    const auto header = split_csv(read_line(in, "trajectory header"));
    if (header.size() < 2 || header[0] != "t") {
        throw ParameterError("trajectory CSV header must start with 't' and name at least one channel");
    }
    std::vector<std::string> channels(header.begin() + 1, header.end());
    std::vector<double> times;
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto cells = split_csv(line);
        if (cells.size() != header.size()) {
            throw ParameterError("trajectory CSV row " + std::to_string(times.size() + 1) + " has " +
                                 std::to_string(cells.size()) + " fields, expected " +
                                 std::to_string(header.size()));
        }
        times.push_back(parse_number(cells[0]));
        for (std::size_t j = 1; j < cells.size(); ++j) {
            values.push_back(parse_number(cells[j]));
        }
    }
    if (times.size() < 2) {
        throw ParameterError("trajectory CSV needs at least two samples to define a time step");
    }
    const double t0 = times.front();
    const double dt = times[1] - times[0];
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double expected = t0 + static_cast<double>(i) * dt;
        if (std::abs(times[i] - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
            throw ParameterError("trajectory CSV time column is not uniform at row " +
                                 std::to_string(i + 1));
        }
    }
    const auto rows = static_cast<Eigen::Index>(times.size());
    const auto cols = static_cast<Eigen::Index>(channels.size());
    Eigen::MatrixXd samples =
        Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            values.data(), rows, cols);
    return Trajectory(t0, dt, std::move(channels), std::move(samples));
}

void write_matrix_coo(std::ostream& out, const WeightedMatrix& w) {
    out << "n=" << w.n() << '\n';
    for (const auto& e : w.entries()) {
        out << e.row() << ',' << e.col() << ',' << format_double(e.value()) << '\n';
    }
}

WeightedMatrix read_matrix_coo(std::istream& in) {
    const std::string header = read_line(in, "matrix header");
    if (header.rfind("n=", 0) != 0) {
        throw ParameterError("matrix file must start with 'n=<dim>'");
    }
    const auto n = static_cast<std::size_t>(parse_index(header.substr(2)));
    std::vector<Eigen::Triplet<double>> entries;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto cells = split_csv(line);
        if (cells.size() != 3) {
            throw ParameterError("matrix entry must be i,j,value: '" + line + "'");
        }
        const auto i = parse_index(cells[0]);
        const auto j = parse_index(cells[1]);
        if (static_cast<std::size_t>(i) >= n || static_cast<std::size_t>(j) >= n) {
            throw ParameterError("matrix entry index out of range: '" + line + "'");
        }
        entries.emplace_back(static_cast<int>(i), static_cast<int>(j), parse_number(cells[2]));
    }
    return WeightedMatrix::from_triplets(n, entries);
}

void write_dense_coo(std::ostream& out, const Eigen::MatrixXd& m) {
    out << "shape=" << m.rows() << 'x' << m.cols() << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            out << i << ',' << j << ',' << format_double(m(i, j)) << '\n';
        }
    }
}

Eigen::MatrixXd read_dense_coo(std::istream& in) {
    const std::string header = read_line(in, "matrix header");
    const auto x = header.find('x');
    if (header.rfind("shape=", 0) != 0 || x == std::string::npos) {
        throw ParameterError("dense matrix file must start with 'shape=<rows>x<cols>'");
    }
    const auto rows = parse_index(header.substr(6, x - 6));
    const auto cols = parse_index(header.substr(x + 1));
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto cells = split_csv(line);
        if (cells.size() != 3) {
            throw ParameterError("matrix entry must be i,j,value: '" + line + "'");
        }
        const auto i = parse_index(cells[0]);
        const auto j = parse_index(cells[1]);
        if (i >= rows || j >= cols) {
            throw ParameterError("matrix entry index out of range: '" + line + "'");
        }
        m(i, j) = parse_number(cells[2]);
    }
    return m;
}

void save_observer(const std::filesystem::path& dir, const TrainedObserver& obs) {
    std::filesystem::create_directories(dir);
    write_to(dir / "w.coo", [&](std::ostream& out) { write_matrix_coo(out, obs.w); });
    write_to(dir / "w_in.coo", [&](std::ostream& out) { write_dense_coo(out, obs.w_in); });
    write_to(dir / "w_out.coo", [&](std::ostream& out) { write_dense_coo(out, obs.w_out); });
    write_to(dir / "c.coo", [&](std::ostream& out) { write_dense_coo(out, Eigen::MatrixXd(obs.c)); });

    RunConfig holder;
    holder.reservoir = obs.config;
    holder.seed = obs.config.seed;
    const std::string all = format_config(holder);
    static const std::vector<std::string> reservoir_keys = {
        "n", "rho", "mean_degree", "zeta", "alpha", "input_scale", "ridge_beta", "topology",
        "rewire_prob", "seed"};
    std::ostringstream manifest;
    std::istringstream lines(all);
    std::string line;
    while (std::getline(lines, line)) {
        const std::string key = line.substr(0, line.find('='));
        if (std::find(reservoir_keys.begin(), reservoir_keys.end(), key) != reservoir_keys.end()) {
            manifest << line << '\n';
        }
    }
    manifest << "inputs=" << join(obs.channels.inputs) << '\n';
    manifest << "outputs=" << join(obs.channels.outputs) << '\n';
    manifest << "trained=" << (obs.trained ? "true" : "false") << '\n';
    write_file(dir / "model.txt", manifest.str());
}

TrainedObserver load_observer(const std::filesystem::path& dir) {
    TrainedObserver obs;
    ConfigBuilder builder;
    std::istringstream manifest(read_file(dir / "model.txt"));
    std::string line;
    std::size_t line_no = 0;
    auto names = [](const std::string& v) {
        std::vector<std::string> out;
        std::stringstream ss(v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            out.push_back(item);
        }
        return out;
    };
    while (std::getline(manifest, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        const std::string key = line.substr(0, eq);
        const std::string value = eq == std::string::npos ? "" : line.substr(eq + 1);
        if (key == "inputs") {
            obs.channels.inputs = names(value);
        } else if (key == "outputs") {
            obs.channels.outputs = names(value);
        } else if (key == "trained") {
            obs.trained = value == "true";
        } else {
            builder.apply_assignment(line, line_no);
        }
    }
    const RunConfig cfg = builder.finish();
    obs.config = cfg.reservoir;
    obs.config.seed = cfg.seed;

    auto in = open_in(dir / "w.coo");
    obs.w = read_matrix_coo(in);
    auto in_w_in = open_in(dir / "w_in.coo");
    obs.w_in = read_dense_coo(in_w_in);
    auto in_w_out = open_in(dir / "w_out.coo");
    obs.w_out = read_dense_coo(in_w_out);
    auto in_c = open_in(dir / "c.coo");
    const Eigen::MatrixXd c = read_dense_coo(in_c);
    if (c.cols() != 1) {
        throw ParameterError("c.coo must hold a column vector");
    }
    obs.c = c.col(0);

    if (obs.w.n() != obs.config.n || static_cast<std::size_t>(obs.w_in.rows()) != obs.n() ||
        obs.k_inputs() != obs.channels.inputs.size() || static_cast<std::size_t>(obs.w_out.cols()) != obs.n() ||
        obs.l_outputs() != obs.channels.outputs.size() || obs.c.size() != obs.w_out.rows()) {
        throw ParameterError("model snapshot in " + dir.string() + " has inconsistent dimensions");
    }
    return obs;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRecord> records, bool with_timing) {
    out << "parameter,value,seed,mse,wall_seconds\n";
    for (const auto& r : records) {
        out << r.parameter << ',' << format_shortest(r.value) << ',' << r.seed << ','
            << format_double(r.mse) << ',';
        if (with_timing) {
            out << format_double(r.wall_seconds, 6);
        }
        out << '\n';
    }
}

void write_comparison_csv(std::ostream& out, std::span<const ComparisonRecord> records) {
    out << "topology,seed,mse\n";
    for (const auto& rec : records) {
        for (const auto& t : rec.trials) {
            out << to_string(rec.kind) << ',' << t.seed << ',' << format_double(t.mse) << '\n';
        }
    }
}

void write_comparison_summary_csv(std::ostream& out, std::span<const ComparisonRecord> records) {
    out << "topology,median_mse,mean_mse,n_ok,n_failed\n";
    for (const auto& rec : records) {
        out << to_string(rec.kind) << ',' << format_double(rec.median_mse) << ','
            << format_double(rec.mean_mse) << ',' << rec.n_ok << ',' << rec.n_failed << '\n';
    }
}

void write_predictions_csv(std::ostream& out, const Trajectory& truth, const Trajectory& predicted) {
    if (truth.num_steps() != predicted.num_steps() || truth.num_channels() != predicted.num_channels()) {
        throw ParameterError("prediction and truth have different shapes");
    }
    out << 't';
    for (const auto& name : truth.channels()) {
        out << ',' << name << "_true";
    }
    for (const auto& name : predicted.channels()) {
        out << ',' << name << "_pred";
    }
    out << '\n';
    for (std::size_t i = 0; i < truth.num_steps(); ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        out << format_double(truth.time(i));
        for (Eigen::Index j = 0; j < truth.samples().cols(); ++j) {
            out << ',' << format_double(truth.samples()(row, j));
        }
        for (Eigen::Index j = 0; j < predicted.samples().cols(); ++j) {
            out << ',' << format_double(predicted.samples()(row, j));
        }
        out << '\n';
    }
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    write_to(path, [&](std::ostream& out) { out << content; });
}

std::string read_file(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace resobs
