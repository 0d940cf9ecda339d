#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "ctsev/error.hpp"
#include "ctsev/feature_table.hpp"
#include "ctsev/random.hpp"

namespace ctsev {
namespace {

FeatureTable random_table(std::size_t rows, std::uint64_t seed) {
  Rng rng(seed);
  FeatureTable t = feature_table_with_all_features();
  for (std::size_t r = 0; r < rows; ++r) {
    FeatureVector v;
    for (FeatureId id = 1; id <= kFeatureCount; ++id) v[id] = rng.uniform() * std::pow(10.0, rng.uniform(-6, 4));
    std::optional<Label> label;
    if (r % 3 == 0) label = Label::Severe;
    else if (r % 3 == 1) label = Label::NonSevere;
    t.add_row("P" + std::to_string(r), label, v);
  }
  return t;
}

std::string to_csv(const FeatureTable& t) {
  std::ostringstream out;
  write_feature_table(out, t);
  return out.str();
}

FeatureTable from_csv(const std::string& text) {
  std::istringstream in(text);
  return read_feature_table(in);
}

TEST(FeatureTable, HeaderHas65Columns) {
  const std::string csv = to_csv(random_table(1, 1));
  const std::string header = csv.substr(0, csv.find('\n'));
  EXPECT_EQ(split_csv_line(header).size(), 65u);
  EXPECT_EQ(header.rfind("patient_id,label,f01,f02,", 0), 0u);
  EXPECT_NE(header.find(",f63"), std::string::npos);
}

TEST(FeatureTable, RoundTripIsBitExact) {
  const FeatureTable t = random_table(20, 2);
  const FeatureTable back = from_csv(to_csv(t));
  EXPECT_EQ(back.columns, t.columns);
  EXPECT_EQ(back.patient_ids, t.patient_ids);
  EXPECT_EQ(back.labels, t.labels);
  EXPECT_EQ(back.values, t.values);
  EXPECT_EQ(to_csv(back), to_csv(t));
}

TEST(FeatureTable, FormatRealRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.123456789, 5e-324}) {
    EXPECT_EQ(std::strtod(format_real(v).c_str(), nullptr), v);
  }
  EXPECT_EQ(format_real(0.0), "0");
}

TEST(FeatureTable, SubsetColumnsAndExtras) {
  const std::string csv =
      "patient_id,label,f03,f59,score,note\n"
      "A,severe,1.5,0.25,0.9,\"x,y\"\n"
      "B,,2,0.5,0.1,plain\n";
  const FeatureTable t = from_csv(csv);
  EXPECT_EQ(t.columns, (std::vector<FeatureId>{3, 59}));
  EXPECT_EQ(t.extra_columns, (std::vector<std::string>{"score", "note"}));
  EXPECT_EQ(t.extra_values[0][1], "x,y");
  EXPECT_FALSE(t.labels[1].has_value());
  EXPECT_FALSE(t.all_labeled());
  EXPECT_EQ(to_csv(t), csv);
}

TEST(FeatureTable, Errors) {
  EXPECT_THROW(from_csv(""), ParseError);
  EXPECT_THROW(from_csv("id,label,f01\n"), ParseError);
  EXPECT_THROW(from_csv("patient_id,label,f01,f01\nA,severe,1,2\n"), ParseError);
  EXPECT_THROW(from_csv("patient_id,label,f01\nA,severe\n"), ParseError);
  EXPECT_THROW(from_csv("patient_id,label,f01\nA,moderate,1\n"), ParseError);
  EXPECT_THROW(from_csv("patient_id,label,f01\nA,severe,abc\n"), ParseError);
  EXPECT_THROW(from_csv("patient_id,label,f01\nA,severe,nan\n"), ParseError);
  EXPECT_THROW(from_csv("patient_id,label,extra,f01\nA,severe,x,1\n"), ParseError);
}

TEST(FeatureTable, ToDataset) {
  const FeatureTable t = from_csv(
      "patient_id,label,f01,f02\n"
      "A,severe,1,2\n"
      "B,non-severe,3,4\n");
  const Dataset all = t.to_dataset();
  EXPECT_EQ(all.rows(), 2u);
  EXPECT_EQ(all.label(0), Label::Severe);
  const std::vector<FeatureId> want{2};
  const Dataset one = t.to_dataset(want);
  EXPECT_EQ(one.columns(), 1u);
  EXPECT_EQ(one.value(1, 0), 4.0);
  const std::vector<FeatureId> missing{5};
  EXPECT_THROW(t.to_dataset(missing), SchemaError);

  const FeatureTable unlabeled = from_csv("patient_id,label,f01\nA,,1\n");
  EXPECT_THROW(unlabeled.to_dataset(), InvalidInputError);
  const std::vector<FeatureId> ids{1};
  EXPECT_EQ(unlabeled.to_unlabeled_dataset(ids).rows(), 1u);
}

TEST(Csv, SplitAndEscape) {
  EXPECT_EQ(split_csv_line("a,\"b,c\",\"d\"\"e\","), (std::vector<std::string>{"a", "b,c", "d\"e", ""}));
  EXPECT_EQ(csv_escape("plain"), "plain");
  EXPECT_EQ(csv_escape("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_escape("q\""), "\"q\"\"\"");
}

}  // namespace
}  // namespace ctsev
