#pragma once

#include "tensorspec/error.hpp"
#include "tensorspec/shape.hpp"
#include "tensorspec/tensor.hpp"
#include "tensorspec/contract.hpp"
#include "tensorspec/decomp.hpp"
#include "tensorspec/spectra.hpp"
#include "tensorspec/io.hpp"
