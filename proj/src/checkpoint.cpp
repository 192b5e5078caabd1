#include <fstream>
#include <sstream>

#include "graphsos/attention.hpp"
#include "graphsos/format.hpp"

namespace graphsos {

std::string dump_attention_params(const AttentionParamsd& params) {
  std::string out = "attn " + std::to_string(params.heads) + " " + std::to_string(params.dim) + "\n";
  auto write = [&out](const Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (c) out += ' ';
        out += format_double(m(r, c));
      }
      out += '\n';
    }
  };
  for (const auto& m : params.query) write(m);
  for (const auto& m : params.key) write(m);
  return out;
}

AttentionParamsd parse_attention_params(const std::string& text) {
  std::istringstream in(text);
  std::string tag;
  int heads = 0, dim = 0;
  if (!(in >> tag >> heads >> dim) || tag != "attn") throw FormatError("checkpoint must start with 'attn <h> <d>'");
  AttentionParamsd p = AttentionParamsd::zeros(heads, dim);
  auto read = [&in](Eigen::MatrixXd& m) {
    std::string tok;
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (!(in >> tok)) throw FormatError("checkpoint truncated");
        m(r, c) = parse_double(tok);
      }
  };
  for (auto& m : p.query) read(m);
  for (auto& m : p.key) read(m);
  std::string extra;
  if (in >> extra) throw FormatError("checkpoint has trailing data");
  return p;
}

void save_attention_params(const std::filesystem::path& path, const AttentionParamsd& params) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << dump_attention_params(params);
}

AttentionParamsd load_attention_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open checkpoint " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_attention_params(buf.str());
}

}  // namespace graphsos
