#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "din/dataset.hpp"
#include "din/error.hpp"

namespace din {

enum class DataFormat { Csv, Arff };

struct LoadOptions {
  DataFormat format = DataFormat::Csv;
  std::string target;
  std::vector<std::string> missing_tokens{"?", ""};
  char delimiter = ',';
};

/// The dataset path does not exist or cannot be opened.
class MissingFileError : public DataError {
 public:
  explicit MissingFileError(const std::filesystem::path& p)
      : DataError("cannot open dataset file '" + p.string() + "'"), path_(p) {}
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

/// CSV with a header row (RFC 4180 quoting) or the ARFF subset with numeric
/// and nominal attributes. Cells matching a missing token become missing;
/// CSV cells that parse fully as numbers become numbers.
RawDataset load_dataset(const std::filesystem::path& path, const LoadOptions& options);
RawDataset parse_csv(std::istream& in, const LoadOptions& options, const std::string& source = "<csv>");
RawDataset parse_arff(std::istream& in, const LoadOptions& options, const std::string& source = "<arff>");

void write_csv(const RawDataset& data, std::ostream& out, char delimiter = ',');

struct Stratify {
  enum class Kind { None, Balanced };
  Kind kind = Kind::None;
  double positive_fraction = 0.5;
  std::string positive_label;  ///< class name counted as positive
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Seeded split. n_test = 0 means every row not used for training.
SplitIndices split_indices(const RawDataset& data, std::size_t n_train, std::uint64_t seed, const Stratify& stratify,
                           std::size_t n_test = 0);

std::pair<RawDataset, RawDataset> split(const RawDataset& data, std::size_t n_train, std::uint64_t seed,
                                        const Stratify& stratify, std::size_t n_test = 0);

}  // namespace din
