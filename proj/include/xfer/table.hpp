#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace xfer {

// One downstream dataset: domain metrics, accuracies in percent, and the two
// transferability variants.
struct DatasetRow {
  std::string name;
  double gap = 0.0;
  double width = 0.0;
  double amount = 1.0;
  double acc_scratch = 0.0;
  double acc_finetune = 0.0;
  double t_fb = 1.0;
  double t_sb = 1.0;
};

// Columns: name,gap,width,amount,acc_scratch,acc_finetune,t_fb,t_sb
std::vector<DatasetRow> read_table(const std::filesystem::path& path);
std::vector<DatasetRow> parse_table(const std::string& csv_text);
std::string table_csv(const std::vector<DatasetRow>& rows);

}  // namespace xfer
