// Copyright 2026 The ldgea Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ldgea {

// Fraunhofer lines in micrometres.
inline constexpr double kLineF = 0.48613;
inline constexpr double kLineD = 0.58756;
inline constexpr double kLineC = 0.65627;

/// Medium marker for air (index exactly 1).
inline constexpr int kAir = -1;

enum class DispersionModel { kConstant, kSellmeier };

struct Glass {
  int id = 0;
  std::string name;
  DispersionModel model = DispersionModel::kSellmeier;
  // Sellmeier: B1..B3 and C1..C3 (um^2).
  std::array<double, 3> b{};
  std::array<double, 3> c{};
  // Constant model: indices at the d, F and C lines.
  double n_d = 1.0, n_f = 1.0, n_c = 1.0;
  double lambda_min_um = 0.3;
  double lambda_max_um = 2.5;

  /// Throws DomainError (naming the glass) outside the validity range.
  double index(double wavelength_um) const;

  static Glass constant(std::string name, double n_d, double n_f, double n_c);
  static Glass sellmeier(std::string name, std::array<double, 3> b, std::array<double, 3> c);
};

/// Refractive index of a catalog glass or of air (`kAir`).
double refractive_index(const Glass* glass, double wavelength_um);

/// Dense 0..N-1 collection of glasses.
class GlassCatalog {
 public:
  GlassCatalog() = default;
  explicit GlassCatalog(std::vector<Glass> glasses);

  /// One glass per line: name,model,coefficients...,lambda_min,lambda_max.
  /// Models: `sellmeier` (B1,B2,B3,C1,C2,C3) or `constant` (n_d,n_F,n_C).
  static GlassCatalog parse(std::istream& in, std::string_view origin = "<stream>");
  static GlassCatalog load(const std::filesystem::path& path);

  std::size_t size() const { return glasses_.size(); }
  bool empty() const { return glasses_.empty(); }
  const Glass& at(int id) const;
  const std::vector<Glass>& glasses() const { return glasses_; }
  std::optional<int> find(std::string_view name) const;

  /// `kAir` yields 1.0.
  double index(int medium, double wavelength_um) const;

  /// Rank of each glass when sorted by d-line index (0 = lowest).
  std::vector<int> index_rank() const;

 private:
  std::vector<Glass> glasses_;
};

}  // namespace ldgea
