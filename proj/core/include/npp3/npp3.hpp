#pragma once

#include "npp3/catalog.hpp"
#include "npp3/congruence.hpp"
#include "npp3/contact.hpp"
#include "npp3/frames.hpp"
#include "npp3/npp.hpp"
#include "npp3/perturbed.hpp"
#include "npp3/tensor.hpp"
