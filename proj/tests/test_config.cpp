#include <gtest/gtest.h>

#include "autotrack/config.hpp"
#include "autotrack/error.hpp"

using namespace autotrack;

TEST(Config, EmptyTextGivesDefaults) {
  const Config c = parse_config("");
  EXPECT_EQ(c.tracker.delta, 0.2);
  EXPECT_EQ(c.tracker.nu, 2e-5);
  EXPECT_EQ(c.tracker.zeta, 13.0);
  EXPECT_EQ(c.tracker.phi, 3000.0);
  EXPECT_EQ(c.tracker.admm_iters, 4);
  EXPECT_EQ(c.tracker.gamma_max, 10000.0);
  EXPECT_EQ(c.tracker.theta_fixed, 15.0);
  EXPECT_TRUE(c == Config{});
}

TEST(Config, NegativeZetaNamesTheKey) {
  try {
    parse_config("zeta=-1\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ConfigInvalid);
    EXPECT_STREQ(e.what(), "config-invalid: zeta");
  }
}

TEST(Config, UnknownKey) {
  try {
    parse_config("delta=0.1\nfancy=3\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ConfigUnknownKey);
    EXPECT_EQ(e.detail(), "fancy");
  }
}

TEST(Config, UnparsableValue) {
  try {
    parse_config("admm_iters=four");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ConfigInvalid);
    EXPECT_EQ(e.detail(), "admm_iters");
  }
}

TEST(Config, CommentsAndWhitespace) {
  const Config c = parse_config("# tuned\n  delta = 0.5  # inline\n\n\tphi=10\r\nvariant=atr\n");
  EXPECT_EQ(c.tracker.delta, 0.5);
  EXPECT_EQ(c.tracker.phi, 10.0);
  EXPECT_EQ(c.tracker.variant, Variant::Atr);
}

TEST(Config, MalformedLine) {
  EXPECT_THROW(parse_config("delta 0.5"), Error);
}

TEST(Config, RoundTrip) {
  Config c;
  c.tracker.delta = 0.123456789012345;
  c.tracker.nu = 3.3e-7;
  c.tracker.scales = 3;
  c.tracker.log_base = LogBase::Ten;
  c.tracker.cease_mode = CeaseMode::Freeze;
  c.tracker.variant = Variant::Asr;
  c.tracker.features.grayscale = false;
  c.bench.pool_frames = true;
  c.bench.threads = 3;
  c.pose.correspondence_hysteresis = 2.5;
  const std::string text = serialize_config(c);
  const Config back = parse_config(text);
  EXPECT_TRUE(back == c);
  EXPECT_EQ(serialize_config(back), text);
  EXPECT_TRUE(parse_config(serialize_config(Config{})) == Config{});
}

TEST(Config, RangeChecks) {
  for (const char* line : {"phi=0", "admm_iters=0", "beta=0.5", "cell_size=0", "scale_damping=1.5",
                           "padding=0.5", "label_sigma=0", "threads=-1", "log_base=2",
                           "cease_mode=never", "variant=kcf"}) {
    EXPECT_THROW(parse_config(line), Error) << line;
  }
}

TEST(Variant, ConfigureVariant) {
  const TrackerConfig base;
  EXPECT_EQ(configure_variant(base, Variant::Strcf).delta, 0.0);
  EXPECT_EQ(configure_variant(base, Variant::Atr).delta, 0.0);
  EXPECT_EQ(configure_variant(base, Variant::Asr).delta, 0.2);
  EXPECT_FALSE(configure_variant(base, Variant::Strcf).temporal_adaptive());
  EXPECT_FALSE(configure_variant(base, Variant::Strcf).spatial_adaptive());
  EXPECT_TRUE(configure_variant(base, Variant::Asr).spatial_adaptive());
  EXPECT_FALSE(configure_variant(base, Variant::Asr).temporal_adaptive());
  EXPECT_TRUE(configure_variant(base, Variant::Atr).temporal_adaptive());
  EXPECT_FALSE(configure_variant(base, Variant::Atr).spatial_adaptive());
  for (Variant v : {Variant::Strcf, Variant::Asr, Variant::Atr, Variant::AutoTrack}) {
    EXPECT_EQ(parse_variant(variant_name(v)), v);
  }
}
