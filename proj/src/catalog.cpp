// Catalog of the stochastic conceptual ENSO models: the six-variable
// reference model plus the learned variants, all in non-dimensional units.

#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "enso/model.hpp"

namespace enso {

namespace {

// Walker-circulation bounds shared by every decadal process.
constexpr double kDecadalLambda = 2.0 / 60.0;  // 1/(5 years)
constexpr double kDecadalLower = 0.0;
constexpr double kDecadalUpper = 4.0;

class Builder {
 public:
  explicit Builder(std::vector<std::string> names, Variant id) {
    spec_.vars = StateVarSet(std::move(names));
    spec_.variant_id = id;
    spec_.equations.resize(spec_.vars.size());
    spec_.noise.resize(spec_.vars.size(), AdditiveNoise{0.0});
  }

  // coefficient * product(vars^powers) * seasonal, appended to d(eq_var)/dt.
  // Zero-valued table entries are kept: they mark selected structure.
  Builder& term(const std::string& eq_var, double coefficient,
                std::initializer_list<std::pair<std::string, int>> monomial,
                Seasonal seasonal = Seasonal::Constant) {
    std::vector<std::pair<int, int>> exps;
    for (const auto& [name, pow] : monomial)
      exps.emplace_back(var(name), pow);
    spec_.equations[var(eq_var)].push_back(
        Term{coefficient, Monomial(std::move(exps)), seasonal});
    return *this;
  }

  Builder& additive(const std::string& eq_var, double sigma) {
    spec_.noise[var(eq_var)] = AdditiveNoise{sigma};
    return *this;
  }

  Builder& wind_noise(const std::string& eq_var, double a,
                      const std::string& driver) {
    spec_.noise[var(eq_var)] = WindMultiplicativeNoise{a, 4.5, 0.25, var(driver)};
    return *this;
  }

  Builder& decadal_noise(const std::string& eq_var) {
    spec_.noise[var(eq_var)] = DecadalMultiplicativeNoise{
        kDecadalLambda, kDecadalLower, kDecadalUpper, var(eq_var)};
    return *this;
  }

  ModelSpec take() {
    spec_.validate();
    return std::move(spec_);
  }

 private:
  int var(const std::string& name) const {
    const int i = spec_.vars.index_of(name);
    if (i < 0) throw CatalogError("catalog term references unknown variable " + name);
    return i;
  }
  ModelSpec spec_;
};

ModelSpec reference_model() {
  // Three-region multiscale recharge-oscillator model. Seasonally modulated
  // dampings c1, c2 and the I-dependent wind couplings are expanded into
  // monomial * seasonal terms so the drift is a plain term sum.
  const double r = 0.15;
  const double gamma = 0.45;
  const double alpha1 = 0.0375;
  const double alpha2 = 0.075;
  const double b0 = 2.5;
  const double mu = 0.5;
  const double gbm2 = gamma * b0 * mu / 2.0;    // 0.28125
  const double a1bm2 = alpha1 * b0 * mu / 2.0;  // 0.0234375
  const double a2bm2 = alpha2 * b0 * mu / 2.0;  // 0.046875

  // beta_E(I) = 0.1239 (2 - 0.2 I); the other wind couplings are fixed
  // multiples of beta_E.
  const double be0 = 0.1239 * 2.0;
  const double be1 = -0.1239 * 0.2;
  const double bu = -0.2, bh = -0.4, bc = 0.8;

  const double advection = 0.12;  // coefficient of I*u in the T_C equation
  const double c_u = 0.018;       // constant forcing in the T_C equation
  const double d_tau = 2.0;       // 1/month

  // c1(T_C, t) = [15.6 (T_C + 0.1)^2 + 0.57] (1 + 0.4 s1); multiplied by T_C
  // this contributes 0.726 T_C + 3.12 T_C^2 + 15.6 T_C^3 and s1 copies.
  const double c1_lin = 15.6 * 0.01 + 0.57;  // 0.726
  const double c1_quad = 15.6 * 0.2;         // 3.12
  const double c1_cub = 15.6;
  const double c1_s1 = 0.4;

  // c2(t) = 0.9 (1 + 0.4 s2 + 0.2 s3)
  const double c2_0 = 0.9, c2_s2 = 0.9 * 0.4, c2_s3 = 0.9 * 0.2;

  Builder b({"u", "hW", "TC", "TE", "tau", "I"}, Variant::Reference);

  b.term("u", -r, {{"u", 1}})
      .term("u", -a1bm2, {{"TC", 1}})
      .term("u", -a1bm2, {{"TE", 1}})
      .term("u", bu * be0, {{"tau", 1}})
      .term("u", bu * be1, {{"tau", 1}, {"I", 1}})
      .additive("u", 0.0310);

  b.term("hW", -r, {{"hW", 1}})
      .term("hW", -a2bm2, {{"TC", 1}})
      .term("hW", -a2bm2, {{"TE", 1}})
      .term("hW", bh * be0, {{"tau", 1}})
      .term("hW", bh * be1, {{"tau", 1}, {"I", 1}})
      .additive("hW", 0.0155);

  b.term("TC", gamma, {{"hW", 1}})
      .term("TC", gbm2 - c1_lin, {{"TC", 1}})
      .term("TC", -c1_lin * c1_s1, {{"TC", 1}}, Seasonal::S1)
      .term("TC", -c1_quad, {{"TC", 2}})
      .term("TC", -c1_quad * c1_s1, {{"TC", 2}}, Seasonal::S1)
      .term("TC", -c1_cub, {{"TC", 3}})
      .term("TC", -c1_cub * c1_s1, {{"TC", 3}}, Seasonal::S1)
      .term("TC", gbm2, {{"TE", 1}})
      .term("TC", advection, {{"u", 1}, {"I", 1}})
      .term("TC", bc * be0, {{"tau", 1}})
      .term("TC", bc * be1, {{"tau", 1}, {"I", 1}})
      .term("TC", c_u, {})
      .additive("TC", 0.0310);

  b.term("TE", gamma, {{"hW", 1}})
      .term("TE", 3.0 * gbm2 - c2_0, {{"TE", 1}})
      .term("TE", -c2_s2, {{"TE", 1}}, Seasonal::S2)
      .term("TE", -c2_s3, {{"TE", 1}}, Seasonal::S3)
      .term("TE", -gbm2, {{"TC", 1}})
      .term("TE", be0, {{"tau", 1}})
      .term("TE", be1, {{"tau", 1}, {"I", 1}})
      .additive("TE", 0.0232);

  b.term("tau", -d_tau, {{"tau", 1}}).wind_noise("tau", 0.9, "TC");

  b.term("I", -kDecadalLambda, {{"I", 1}})
      .term("I", kDecadalLambda * 2.0, {})
      .decadal_noise("I");

  return b.take();
}

ModelSpec model_ia_is_dma() {
  Builder b({"u", "hW", "TC", "TE", "tau", "I"}, Variant::IaIsDMA);
  b.term("u", -0.1400, {{"u", 1}})
      .term("u", -0.0428, {{"tau", 1}})
      .term("u", 0.0000, {})
      .additive("u", 0.0310);
  b.term("hW", -0.1663, {{"hW", 1}})
      .term("hW", -0.0694, {{"TE", 1}})
      .term("hW", -0.1007, {{"tau", 1}})
      .term("hW", 0.0100, {{"tau", 1}, {"I", 1}})
      .term("hW", 0.0001, {})
      .additive("hW", 0.0155);
  b.term("TC", 0.4540, {{"hW", 1}})
      .term("TC", -0.4505, {{"TC", 1}})
      .term("TC", -0.2989, {{"TC", 1}}, Seasonal::S1)
      .term("TC", 0.2850, {{"TE", 1}})
      .term("TC", 0.1983, {{"tau", 1}})
      .term("TC", -3.1142, {{"TC", 2}})
      .term("TC", -1.2090, {{"TC", 2}}, Seasonal::S1)
      .term("TC", 0.1218, {{"u", 1}, {"I", 1}})
      .term("TC", -0.0196, {{"tau", 1}, {"I", 1}})
      .term("TC", -15.6559, {{"TC", 3}})
      .term("TC", -6.2024, {{"TC", 3}}, Seasonal::S1)
      .term("TC", 0.0177, {})
      .additive("TC", 0.0310);
  b.term("TE", 0.4493, {{"hW", 1}})
      .term("TE", -0.2830, {{"TC", 1}})
      .term("TE", -0.0558, {{"TE", 1}})
      .term("TE", -0.3618, {{"TE", 1}}, Seasonal::S2)
      .term("TE", -0.1788, {{"TE", 1}}, Seasonal::S3)
      .term("TE", 0.2470, {{"tau", 1}})
      .term("TE", -0.0245, {{"tau", 1}, {"I", 1}})
      .term("TE", 0.0001, {})
      .additive("TE", 0.0232);
  b.term("tau", -1.9942, {{"tau", 1}})
      .term("tau", 0.0045, {})
      .wind_noise("tau", 0.8999, "TC");
  b.term("I", -0.0323, {{"I", 1}}).term("I", 0.0639, {}).decadal_noise("I");
  return b.take();
}

ModelSpec model_ia_is_ma() {
  Builder b({"u", "hW", "TC", "TE", "tau"}, Variant::IaIsMA);
  b.term("u", -0.1400, {{"u", 1}})
      .term("u", -0.0428, {{"tau", 1}})
      .term("u", 0.0000, {})
      .additive("u", 0.0310);
  b.term("hW", -0.1481, {{"hW", 1}})
      .term("hW", -0.0501, {{"TC", 1}})
      .term("hW", -0.0456, {{"TE", 1}})
      .term("hW", -0.0793, {{"tau", 1}})
      .term("hW", 0.0000, {})
      .additive("hW", 0.0155);
  b.term("TC", 0.2183, {{"u", 1}})
      .term("TC", 0.4222, {{"hW", 1}})
      .term("TC", -0.4061, {{"TC", 1}})
      .term("TC", -0.2989, {{"TC", 1}}, Seasonal::S1)
      .term("TC", 0.2455, {{"TE", 1}})
      .term("TC", 0.1568, {{"tau", 1}})
      .term("TC", -2.8721, {{"TC", 2}})
      .term("TC", -1.1140, {{"TC", 2}}, Seasonal::S1)
      .term("TC", -14.5992, {{"TC", 3}})
      .term("TC", -5.6033, {{"TC", 3}}, Seasonal::S1)
      .term("TC", 0.0166, {})
      .additive("TC", 0.0310);
  b.term("TE", 0.4443, {{"hW", 1}})
      .term("TE", -0.2741, {{"TC", 1}})
      .term("TE", -0.0553, {{"TE", 1}})
      .term("TE", -0.3597, {{"TE", 1}}, Seasonal::S2)
      .term("TE", -0.1791, {{"TE", 1}}, Seasonal::S3)
      .term("TE", 0.1976, {{"tau", 1}})
      .term("TE", 0.0001, {})
      .additive("TE", 0.0232);
  b.term("tau", -1.9942, {{"tau", 1}})
      .term("tau", 0.0045, {})
      .wind_noise("tau", 0.8999, "TC");
  return b.take();
}

ModelSpec model_ia_is_dm() {
  Builder b({"hW", "TC", "TE", "tau", "I"}, Variant::IaIsDM);
  b.term("hW", -0.1663, {{"hW", 1}})
      .term("hW", -0.0694, {{"TE", 1}})
      .term("hW", -0.1007, {{"tau", 1}})
      .term("hW", 0.0100, {{"tau", 1}, {"I", 1}})
      .term("hW", 0.0001, {})
      .additive("hW", 0.0155);
  b.term("TC", 0.5030, {{"hW", 1}})
      .term("TC", -0.4785, {{"TC", 1}})
      .term("TC", -0.2993, {{"TC", 1}}, Seasonal::S1)
      .term("TC", 0.3142, {{"TE", 1}})
      .term("TC", 0.1981, {{"tau", 1}})
      .term("TC", -2.9602, {{"TC", 2}})
      .term("TC", -1.1545, {{"TC", 2}}, Seasonal::S1)
      .term("TC", 0.0555, {{"TC", 1}, {"I", 1}})
      .term("TC", -0.0563, {{"TE", 1}, {"I", 1}})
      .term("TC", -0.0203, {{"tau", 1}, {"I", 1}})
      .term("TC", -15.3784, {{"TC", 3}})
      .term("TC", -6.2253, {{"TC", 3}}, Seasonal::S1)
      .term("TC", 0.0166, {})
      .additive("TC", 0.0310);
  b.term("TE", 0.4493, {{"hW", 1}})
      .term("TE", -0.2830, {{"TC", 1}})
      .term("TE", -0.0558, {{"TE", 1}})
      .term("TE", -0.3518, {{"TE", 1}}, Seasonal::S2)
      .term("TE", -0.1788, {{"TE", 1}}, Seasonal::S3)
      .term("TE", 0.2470, {{"tau", 1}})
      .term("TE", -0.0245, {{"tau", 1}, {"I", 1}})
      .term("TE", 0.0001, {})
      .additive("TE", 0.0232);
  b.term("tau", -1.9942, {{"tau", 1}})
      .term("tau", 0.0045, {})
      .wind_noise("tau", 0.8999, "TC");
  b.term("I", -0.0323, {{"I", 1}}).term("I", 0.0639, {}).decadal_noise("I");
  return b.take();
}

ModelSpec model_ia_is_m() {
  Builder b({"hW", "TC", "TE", "tau"}, Variant::IaIsM);
  b.term("hW", -0.1481, {{"hW", 1}})
      .term("hW", -0.0501, {{"TC", 1}})
      .term("hW", -0.0456, {{"TE", 1}})
      .term("hW", -0.0793, {{"tau", 1}})
      .term("hW", 0.0000, {})
      .additive("hW", 0.0155);
  b.term("TC", 0.4861, {{"hW", 1}})
      .term("TC", -0.3443, {{"TC", 1}})
      .term("TC", -0.3014, {{"TC", 1}}, Seasonal::S1)
      .term("TC", 0.1813, {{"TE", 1}})
      .term("TC", 0.1558, {{"tau", 1}})
      .term("TC", -2.7519, {{"TC", 2}})
      .term("TC", -1.0865, {{"TC", 2}}, Seasonal::S1)
      .term("TC", -14.2956, {{"TC", 3}})
      .term("TC", -5.7679, {{"TC", 3}}, Seasonal::S1)
      .term("TC", 0.0158, {})
      .additive("TC", 0.0310);
  b.term("TE", 0.4446, {{"hW", 1}})
      .term("TE", -0.2741, {{"TC", 1}})
      .term("TE", -0.0553, {{"TE", 1}})
      .term("TE", -0.3597, {{"TE", 1}}, Seasonal::S2)
      .term("TE", -0.1791, {{"TE", 1}}, Seasonal::S3)
      .term("TE", 0.1976, {{"tau", 1}})
      .term("TE", 0.0000, {})
      .additive("TE", 0.0232);
  b.term("tau", -1.9942, {{"tau", 1}})
      .term("tau", 0.0045, {})
      .wind_noise("tau", 0.8999, "TC");
  return b.take();
}

ModelSpec model_ia_m() {
  Builder b({"hW", "TC", "TE"}, Variant::IaM);
  b.term("hW", -0.0678, {{"hW", 1}})
      .term("hW", -0.1927, {{"TC", 1}})
      .term("hW", -0.0593, {{"TE", 1}})
      .term("hW", -0.6729, {{"TC", 2}})
      .term("hW", 0.0049, {})
      .additive("hW", 0.0156);
  b.term("TC", 0.3146, {{"hW", 1}})
      .term("TC", -0.2553, {{"TC", 1}})
      .term("TC", -0.1799, {{"TC", 1}}, Seasonal::S1)
      .term("TC", 0.2340, {{"TE", 1}})
      .term("TC", 0.6729, {{"hW", 1}, {"TC", 1}})
      .term("TC", -1.1864, {{"TC", 1}, {"TE", 1}})
      .term("TC", 0.0070, {})
      .additive("TC", 0.0311);
  b.term("TE", 0.2719, {{"hW", 1}})
      .term("TE", 0.0523, {{"TE", 1}})
      .term("TE", -0.2549, {{"TE", 1}}, Seasonal::S2)
      .term("TE", -0.1792, {{"TE", 1}}, Seasonal::S3)
      .term("TE", 1.1864, {{"TC", 2}})
      .term("TE", -0.0134, {{"TE", 2}})
      .term("TE", 0.0284, {{"TE", 2}}, Seasonal::S2)
      .term("TE", 0.0381, {{"TE", 2}}, Seasonal::S3)
      .term("TE", -0.2611, {{"TE", 3}})
      .term("TE", -0.3158, {{"TE", 3}}, Seasonal::S2)
      .term("TE", 0.1207, {{"TE", 3}}, Seasonal::S3)
      .term("TE", -0.0078, {})
      .additive("TE", 0.0236);
  return b.take();
}

ModelSpec model_linear_6d() {
  Builder b({"u", "hW", "TC", "TE", "tau", "I"}, Variant::Linear6D);
  b.term("u", -0.1400, {{"u", 1}})
      .term("u", -0.0428, {{"tau", 1}})
      .term("u", 0.0000, {})
      .additive("u", 0.0310);
  b.term("hW", -0.1663, {{"hW", 1}})
      .term("hW", -0.0694, {{"TE", 1}})
      .term("hW", -0.1007, {{"tau", 1}})
      .term("hW", 0.0100, {{"tau", 1}, {"I", 1}})
      .term("hW", 0.0001, {})
      .additive("hW", 0.0155);
  b.term("TC", 0.4461, {{"hW", 1}})
      .term("TC", -0.5564, {{"TC", 1}})
      .term("TC", -0.2799, {{"TC", 1}}, Seasonal::S1)
      .term("TC", 0.1990, {{"TE", 1}})
      .term("TC", 0.1766, {{"tau", 1}})
      .term("TC", 0.1000, {{"u", 1}, {"I", 1}})
      .term("TC", -0.0162, {{"tau", 1}, {"I", 1}})
      .term("TC", -0.0007, {})
      .additive("TC", 0.0310);
  b.term("TE", 0.4493, {{"hW", 1}})
      .term("TE", -0.2830, {{"TC", 1}})
      .term("TE", -0.0558, {{"TE", 1}})
      .term("TE", -0.3618, {{"TE", 1}}, Seasonal::S2)
      .term("TE", -0.1788, {{"TE", 1}}, Seasonal::S3)
      .term("TE", 0.2470, {{"tau", 1}})
      .term("TE", -0.0245, {{"tau", 1}, {"I", 1}})
      .term("TE", 0.0001, {})
      .additive("TE", 0.0232);
  b.term("tau", -1.9942, {{"tau", 1}})
      .term("tau", 0.0045, {})
      .wind_noise("tau", 0.8999, "TC");
  b.term("I", -0.0323, {{"I", 1}}).term("I", 0.0639, {}).decadal_noise("I");
  return b.take();
}

ModelSpec model_latent_4d() {
  Builder b({"hW", "TC", "TE", "latent"}, Variant::Latent4D);
  b.term("hW", -0.1003, {{"hW", 1}})
      .term("hW", -0.0819, {{"TC", 1}})
      .term("hW", -0.0289, {{"latent", 1}})
      .term("hW", -0.1069, {{"TC", 1}, {"latent", 1}})
      .term("hW", 0.0012, {})
      .additive("hW", 0.0155);
  b.term("TC", 0.3470, {{"hW", 1}})
      .term("TC", -0.2554, {{"TC", 1}})
      .term("TC", -0.2584, {{"TC", 1}}, Seasonal::S1)
      .term("TC", 0.0589, {{"latent", 1}})
      .term("TC", -2.1976, {{"TC", 2}})
      .term("TC", -0.5077, {{"TC", 2}}, Seasonal::S1)
      .term("TC", 0.1834, {{"TC", 1}, {"latent", 1}})
      .term("TC", -10.1500, {{"TC", 3}})
      .term("TC", -1.8734, {{"TC", 3}}, Seasonal::S1)
      .term("TC", 0.0122, {})
      .additive("TC", 0.0310);
  b.term("TE", 0.3222, {{"hW", 1}})
      .term("TE", -0.1863, {{"TC", 1}})
      .term("TE", -0.2110, {{"TE", 1}})
      .term("TE", -0.1402, {{"TE", 1}}, Seasonal::S2)
      .term("TE", -0.0768, {{"TE", 1}}, Seasonal::S3)
      .term("TE", 0.0782, {{"latent", 1}})
      .term("TE", 0.2580, {{"TC", 1}, {"latent", 1}})
      .term("TE", -0.0017, {})
      .additive("TE", 0.0232);
  b.term("latent", -1.5815, {{"latent", 1}})
      .term("latent", -0.1297, {})
      .additive("latent", 2.2034);
  return b.take();
}

}  // namespace

ModelSpec build_model(Variant variant) {
  switch (variant) {
    case Variant::Reference: return reference_model();
    case Variant::IaIsDMA: return model_ia_is_dma();
    case Variant::IaIsMA: return model_ia_is_ma();
    case Variant::IaIsDM: return model_ia_is_dm();
    case Variant::IaIsM: return model_ia_is_m();
    case Variant::IaM: return model_ia_m();
    case Variant::Linear6D: return model_linear_6d();
    case Variant::Latent4D: return model_latent_4d();
    case Variant::Custom:
      throw CatalogError("Custom is not a catalog variant; construct a ModelSpec directly");
  }
  throw CatalogError("unknown model variant");
}

}  // namespace enso
