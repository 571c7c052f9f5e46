#include <gtest/gtest.h>

#include "hmp/errors.hpp"
#include "hmp/scenarios.hpp"
#include "hmp/schedule.hpp"

using namespace hmp;

namespace {

ResponseTimeMatrix make(std::initializer_list<std::initializer_list<double>> rows,
                        std::vector<JointMode> init) {
  ResponseTimeMatrix T;
  T.times.resize(static_cast<int>(rows.size()), static_cast<int>(rows.begin()->size()));
  int i = 0;
  for (auto& r : rows) {
    int c = 0;
    for (double v : r) T.times(i, c++) = v;
    ++i;
  }
  T.initial_mode = std::move(init);
  return T;
}

}  // namespace

TEST(Schedule, DecodesExampleMatrix) {
  const auto T = example_matrix();
  const auto s = validate(T);
  EXPECT_DOUBLE_EQ(s.horizon, 0.9);
  EXPECT_EQ(mode_at(s, 0, 0.05), JointMode::Passive);
  EXPECT_EQ(mode_at(s, 0, 0.1), JointMode::Transition);
  EXPECT_EQ(mode_at(s, 0, 0.2), JointMode::Active);
  EXPECT_EQ(mode_at(s, 0, 0.5), JointMode::Passive);
  EXPECT_EQ(mode_at(s, 1, 0.15), JointMode::Passive);
  EXPECT_EQ(mode_at(s, 1, 0.2), JointMode::Transition);
  EXPECT_EQ(mode_at(s, 1, 0.6), JointMode::Active);
  EXPECT_EQ(mode_at(s, 1, 0.89), JointMode::Active);  // the t_f entry does not toggle
  EXPECT_THROW(mode_at(s, 0, 0.9), RangeError);
  EXPECT_THROW(mode_at(s, 2, 0.1), RangeError);
}

TEST(Schedule, IntervalsPartitionHorizon) {
  const auto s = validate(example_matrix());
  for (const auto& row : s.joints) {
    ASSERT_FALSE(row.empty());
    EXPECT_DOUBLE_EQ(row.front().begin, 0.0);
    EXPECT_DOUBLE_EQ(row.back().end, 0.9);
    for (std::size_t k = 1; k < row.size(); ++k) EXPECT_DOUBLE_EQ(row[k].begin, row[k - 1].end);
  }
}

TEST(Schedule, BlendWindowIsCentred) {
  const auto s = validate(example_matrix(), 0.05);
  const auto& iv = s.interval_at(0, 0.1);
  EXPECT_NEAR(iv.begin, 0.075, 1e-12);
  EXPECT_NEAR(iv.end, 0.125, 1e-12);
  EXPECT_NEAR(iv.blend_fraction(0.1), 0.5, 1e-12);
  EXPECT_EQ(iv.from, JointMode::Passive);
  EXPECT_EQ(iv.to, JointMode::Active);
}

TEST(Schedule, AllZeroRowStaysInInitialMode) {
  const auto s = validate(make({{0.0, 0.0, 1.0}, {0.0, 0.0, 0.0}}, {JointMode::Active, JointMode::Passive}));
  EXPECT_EQ(mode_at(s, 0, 0.7), JointMode::Active);
  EXPECT_EQ(mode_at(s, 1, 0.7), JointMode::Passive);
}

TEST(Schedule, RejectsNonMonotoneRow) {
  try {
    validate(make({{0.5, 0.3, 1.0}}, {JointMode::Passive}));
    FAIL();
  } catch (const ScheduleError& e) {
    EXPECT_EQ(e.joint(), 0);
    EXPECT_EQ(e.column(), 1);
  }
}

TEST(Schedule, RejectsBadEntries) {
  EXPECT_THROW(validate(make({{-0.1, 1.0}}, {JointMode::Passive})), InputError);
  EXPECT_THROW(validate(make({{NAN, 1.0}}, {JointMode::Passive})), InputError);
  EXPECT_THROW(validate(make({{0.0, 0.0}}, {JointMode::Passive})), InputError);
  EXPECT_THROW(validate(make({{0.1, 1.0}}, {})), InputError);
  EXPECT_THROW(validate(make({{0.1, 1.0}}, {JointMode::Transition})), InputError);
}

TEST(Schedule, ParameterizationRoundTrip) {
  const auto T = example_matrix();
  const auto pattern = SwitchPattern::of(T);
  EXPECT_EQ(pattern.parameters(), 5);
  const auto z = unparameterize(T);
  const auto back = parameterize(z, pattern, T.initial_mode);
  EXPECT_LT((back.times - T.times).norm(), 1e-12);
}

TEST(Schedule, ParameterizationAlwaysValid) {
  const auto pattern = SwitchPattern::of(example_matrix());
  Eigen::VectorXd z(5);
  z << -3.0, 2.0, -10.0, 0.0, 1.5;
  EXPECT_NO_THROW(validate(parameterize(z, pattern, {JointMode::Passive, JointMode::Passive})));
}

TEST(Schedule, ChangePointsSortedUnique) {
  const auto cp = validate(example_matrix()).change_points();
  for (std::size_t k = 1; k < cp.size(); ++k) EXPECT_LT(cp[k - 1], cp[k]);
}
