/*
 * Copyright 2026 The copboost Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "copboost/links.hpp"

#include <cmath>

#include "copboost/error.hpp"
#include "copboost/special.hpp"

namespace copboost {

Link parse_link(std::string_view name) {
  if (name == "identity") return Link::identity;
  if (name == "log") return Link::log;
  if (name == "logit") return Link::logit;
  if (name == "probit") return Link::probit;
  if (name == "cloglog") return Link::cloglog;
  throw ConfigError("unknown link '" + std::string(name) + "'");
}

std::string_view link_name(Link link) {
  switch (link) {
    case Link::identity: return "identity";
    case Link::log: return "log";
    case Link::logit: return "logit";
    case Link::probit: return "probit";
    case Link::cloglog: return "cloglog";
  }
  return "?";
}

double response_apply(Link link, double eta) {
  switch (link) {
    case Link::identity: return eta;
    case Link::log: return std::exp(eta);
    case Link::logit:
      return eta >= 0.0 ? 1.0 / (1.0 + std::exp(-eta)) : std::exp(eta) / (1.0 + std::exp(eta));
    case Link::probit: return special::norm_cdf(eta);
    case Link::cloglog: return -std::expm1(-std::exp(eta));
  }
  throw ConfigError("unknown link id");
}

double link_apply(Link link, double value) {
  switch (link) {
    case Link::identity: return value;
    case Link::log: return std::log(value);
    case Link::logit: return std::log(value) - std::log1p(-value);
    case Link::probit: return special::norm_quantile(value);
    case Link::cloglog: return std::log(-std::log1p(-value));
  }
  throw ConfigError("unknown link id");
}

double response_derivative(Link link, double eta) {
  switch (link) {
    case Link::identity: return 1.0;
    case Link::log: return std::exp(eta);
    case Link::logit: {
      const double p = response_apply(Link::logit, eta);
      return p * (1.0 - p);
    }
    case Link::probit: return special::norm_pdf(eta);
    case Link::cloglog: return std::exp(eta - std::exp(eta));
  }
  throw ConfigError("unknown link id");
}

}  // namespace copboost
