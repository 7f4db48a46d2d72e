#ifndef MRI_MRI_HPP
#define MRI_MRI_HPP

#include <mri/estimators.hpp>
#include <mri/interpolant.hpp>
#include <mri/polybasis.hpp>
#include <mri/sampling.hpp>
#include <mri/snapshots.hpp>
#include <mri/testbeds.hpp>
#include <mri/types.hpp>

#endif /* MRI_MRI_HPP */
