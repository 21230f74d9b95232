// Copyright 2026 The sedkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstring>
#include <optional>
#include <random>

#include <gtest/gtest.h>

#include "oracles.h"
#include "sed/error.h"
#include "sed/model.h"
#include "tempdir.h"

namespace sed {
namespace {

Model MakeModel(uint64_t seed, bool normalize = true) {
  Model m;
  m.config = sedtest::TinyCrnnConfig();
  m.vocab = Vocabulary({"dog", "siren"});
  m.features.n_mels = m.config.n_mels;
  m.params = InitParams(m.config, seed);
  std::mt19937_64 rng(seed);
  ForEachParam(m.params, [&](const std::string&, Tensor& t) {
    t = sedtest::RandomTensor(rng, t.dims, -2, 2);
  });
  QuantizeToFloat(m.params);
  if (normalize) {
    m.normalizer.mean = {0.25, -1.5};
    m.normalizer.stddev = {2.0, 0.5};
  }
  return m;
}

uint32_t U32At(const std::string& s, size_t off) {
  uint32_t v;
  std::memcpy(&v, s.data() + off, 4);
  return v;
}

// Splits an encoded checkpoint into (header, raw tensor records) by walking
// the layout directly.
std::pair<std::string, std::vector<std::string>> SplitRecords(const std::string& bytes) {
  const size_t cfg_len = U32At(bytes, 8);
  const size_t count_at = 12 + cfg_len;
  const uint32_t count = U32At(bytes, count_at);
  std::vector<std::string> recs;
  size_t p = count_at + 4;
  for (uint32_t i = 0; i < count; ++i) {
    const size_t start = p;
    uint16_t name_len;
    std::memcpy(&name_len, bytes.data() + p, 2);
    p += 2 + name_len;
    const uint8_t rank = static_cast<uint8_t>(bytes[p++]);
    size_t n = 1;
    for (int d = 0; d < rank; ++d, p += 4) n *= U32At(bytes, p);
    p += 4 * n;
    recs.push_back(bytes.substr(start, p - start));
  }
  EXPECT_EQ(p, bytes.size());
  return {bytes.substr(0, count_at), recs};
}

std::string Join(const std::string& header, const std::vector<std::string>& recs) {
  std::string out = header;
  const uint32_t n = static_cast<uint32_t>(recs.size());
  out.append(reinterpret_cast<const char*>(&n), 4);
  for (const auto& r : recs) out += r;
  return out;
}

std::optional<ErrorKind> DecodeKind(const std::string& bytes) {
  try {
    DecodeCheckpoint(bytes);
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

TEST(Checkpoint, RoundTripIsBitExact) {
  for (bool norm : {true, false}) {
    const Model m = MakeModel(11, norm);
    const std::string bytes = EncodeCheckpoint(m);
    const Model back = DecodeCheckpoint(bytes);
    EXPECT_EQ(back.config, m.config);
    EXPECT_EQ(back.vocab, m.vocab);
    EXPECT_EQ(back.normalizer.mean, m.normalizer.mean);
    EXPECT_EQ(back.normalizer.stddev, m.normalizer.stddev);
    std::vector<std::vector<double>> a, b;
    ForEachParam(m.params, [&](const std::string&, const Tensor& t) { a.push_back(t.data); });
    ForEachParam(back.params, [&](const std::string&, const Tensor& t) { b.push_back(t.data); });
    EXPECT_EQ(a, b);
    EXPECT_EQ(EncodeCheckpoint(back), bytes);
  }
}

TEST(Checkpoint, FileRoundTrip) {
  sedtest::TempDir tmp;
  const Model m = MakeModel(12);
  WriteCheckpoint(m, tmp / "m.sedm");
  EXPECT_EQ(EncodeCheckpoint(ReadCheckpoint(tmp / "m.sedm")), EncodeCheckpoint(m));
  EXPECT_THROW(ReadCheckpoint(tmp / "absent.sedm"), Error);
}

TEST(Checkpoint, CorruptInputsAreFormatErrors) {
  const std::string good = EncodeCheckpoint(MakeModel(13));
  EXPECT_EQ(DecodeKind("XXXX" + good.substr(4)), ErrorKind::kFormat);
  EXPECT_EQ(DecodeKind(good + "x"), ErrorKind::kFormat);
  EXPECT_EQ(DecodeKind(""), ErrorKind::kFormat);
  for (size_t cut : {size_t{3}, size_t{10}, good.size() / 2, good.size() - 1}) {
    EXPECT_EQ(DecodeKind(good.substr(0, cut)), ErrorKind::kFormat) << cut;
  }
  std::string bad_version = good;
  bad_version[4] = 2;
  EXPECT_EQ(DecodeKind(bad_version), ErrorKind::kUnsupported);

  auto [header, recs] = SplitRecords(good);
  ASSERT_GT(recs.size(), 3u);
  EXPECT_EQ(DecodeKind(Join(header, recs)), std::nullopt);
  std::vector<std::string> missing(recs.begin() + 1, recs.end());
  EXPECT_EQ(DecodeKind(Join(header, missing)), ErrorKind::kFormat);
  std::vector<std::string> dup = recs;
  dup.push_back(recs[2]);
  EXPECT_EQ(DecodeKind(Join(header, dup)), ErrorKind::kFormat);
  // Tensors are found by name, so record order does not matter.
  std::vector<std::string> swapped = recs;
  std::swap(swapped[0], swapped[1]);
  EXPECT_EQ(DecodeKind(Join(header, swapped)), std::nullopt);
}

TEST(Checkpoint, VocabularyMismatchRejectedOnEncode) {
  Model m = MakeModel(14);
  m.vocab = Vocabulary({"only"});
  try {
    EncodeCheckpoint(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kModel);
  }
}

TEST(Normalizer, FitAndApply) {
  FeatureMatrix a, b;
  a.values = Matrix(2, 2);
  b.values = Matrix(2, 2);
  a.values.data = {1, 10, 3, 10};
  b.values.data = {5, 10, 7, 10};
  const InputNormalizer n = InputNormalizer::Fit({&a, &b});
  EXPECT_DOUBLE_EQ(n.mean[0], 4.0);
  EXPECT_DOUBLE_EQ(n.mean[1], 10.0);
  EXPECT_EQ(n.stddev[0], static_cast<double>(static_cast<float>(std::sqrt(5.0))));
  EXPECT_EQ(n.stddev[1], static_cast<double>(1e-6f));
  const FeatureMatrix z = n.Apply(a);
  EXPECT_NEAR(z.values(0, 0), -3.0 / std::sqrt(5.0), 1e-7);
  EXPECT_EQ(z.values(0, 1), 0.0);
  FeatureMatrix wrong;
  wrong.values = Matrix(2, 3);
  EXPECT_THROW(n.Apply(wrong), Error);
  EXPECT_EQ(InputNormalizer().Apply(a).values.data, a.values.data);
}

TEST(Model, PredictShapeAndRange) {
  const Model m = MakeModel(15);
  FeatureMatrix f;
  f.values = Matrix(17, 2);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (double& v : f.values.data) v = g(rng);
  const SoftTargetMatrix p = m.Predict(f);
  EXPECT_EQ(p.rows, 2u);
  EXPECT_EQ(p.cols, 17u);
  for (double v : p.data) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
  // Normalization is part of Predict.
  Model raw = m;
  raw.normalizer = {};
  EXPECT_EQ(raw.Predict(m.normalizer.Apply(f)).data, p.data);
}

TEST(Model, QuantizeIsIdempotent) {
  CrnnParams p = InitParams(sedtest::TinyCrnnConfig(), 3);
  p.conv[0].kernels.data[0] = 0.1;
  QuantizeToFloat(p);
  EXPECT_EQ(p.conv[0].kernels.data[0], static_cast<double>(0.1f));
  const CrnnParams q = p;
  QuantizeToFloat(p);
  EXPECT_EQ(p.conv[0].kernels.data, q.conv[0].kernels.data);
}

}  // namespace
}  // namespace sed
