#include "xfer/table.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "xfer/error.hpp"

namespace xfer {
namespace {

constexpr const char* kHeader = "name,gap,width,amount,acc_scratch,acc_finetune,t_fb,t_sb";

double parse_number(const std::string& cell, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used == cell.size()) return v;
  } catch (const std::exception&) {
  }
  throw InputError("table line " + std::to_string(line_no) + ": '" + cell + "' is not a number");
}

}  // namespace

std::vector<DatasetRow> parse_table(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  if (!std::getline(in, line)) throw InputError("table is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) throw InputError(std::string("table header must be '") + kHeader + "'");

  std::vector<DatasetRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 8) throw InputError("table line " + std::to_string(line_no) + " needs 8 columns");
    DatasetRow r;
    r.name = cells[0];
    r.gap = parse_number(cells[1], line_no);
    r.width = parse_number(cells[2], line_no);
    r.amount = parse_number(cells[3], line_no);
    r.acc_scratch = parse_number(cells[4], line_no);
    r.acc_finetune = parse_number(cells[5], line_no);
    r.t_fb = parse_number(cells[6], line_no);
    r.t_sb = parse_number(cells[7], line_no);
    if (r.amount < 1.0) throw InputError("table line " + std::to_string(line_no) + ": amount must be >= 1");
    if (r.acc_scratch < 0 || r.acc_scratch > 100 || r.acc_finetune < 0 || r.acc_finetune > 100)
      throw InputError("table line " + std::to_string(line_no) + ": accuracies must be in [0,100]");
    if (!(r.t_fb > 0) || !(r.t_sb > 0))
      throw InputError("table line " + std::to_string(line_no) + ": transferabilities must be positive");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<DatasetRow> read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open table '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_table(ss.str());
}

std::string table_csv(const std::vector<DatasetRow>& rows) {
  std::string out = std::string(kHeader) + "\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", r.name.c_str(), r.gap, r.width,
                  r.amount, r.acc_scratch, r.acc_finetune, r.t_fb, r.t_sb);
    out += buf;
  }
  return out;
}

}  // namespace xfer
