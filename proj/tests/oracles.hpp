// Independent reference implementations used only by tests. Everything here
// recomputes results by the most direct route available (O(N^2) DFT,
// explicit-matrix DCT, fresh-from-scratch linkage distances, permutation
// enumeration) so the production paths are checked against genuinely
// different code.
#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "terrain/clustering.hpp"
#include "terrain/linalg.hpp"
#include "terrain/mfcc.hpp"

namespace oracle {

// O(N^2) DFT power spectrum of the zero-padded signal.
std::vector<double> direct_power_spectrum(const std::vector<double>& signal,
                                          std::size_t fft_size);

// Full MFCC recomputation: direct DFT, filterbank built from the mel formula
// here, explicit DCT matrix.
terrain::Vec direct_mfcc(const std::vector<double>& window, double sample_rate,
                         const terrain::MfccConfig& cfg);

// Mel triangle center frequencies, reconstructed locally.
std::vector<double> mel_centers(std::size_t n_filters, double sample_rate);

// Per-point unnormalized joint densities w_k * N(x | mu_k, var_k), computed
// directly (no logs); argmax with ties to the smaller index.
std::vector<int> density_argmax(const terrain::GmmModel& model,
                                const std::vector<terrain::Vec>& features);

// Naive run-length scanner.
std::vector<terrain::Sequence> runlength_sequences(const std::vector<int>& labels);

// Naive O(n^3) agglomeration that recomputes every cluster distance from the
// original matrix at every step. Returns final labels and the merge trace as
// (min-member, min-member) slot pairs.
std::vector<int> naive_agglomerate(const terrain::AffinityMatrix& aff, std::size_t target_k,
                                   terrain::Linkage linkage,
                                   std::vector<std::pair<std::size_t, std::size_t>>* trace);

// NMI straight from the contingency-table definition (no special cases).
double nmi_from_definition(const std::vector<int>& pred, const std::vector<int>& truth);

// Best matched count over all injective cluster->class assignments, by
// permutation enumeration (small tables).
long long best_mapping_bruteforce(const std::vector<std::vector<long long>>& table);

// Mean silhouette of a labeled point set (Euclidean).
double silhouette(const std::vector<terrain::Vec>& points, const std::vector<int>& labels);

// Central finite differences of f at x.
std::vector<double> finite_difference_gradient(const std::vector<double>& x,
                                               double (*f)(const std::vector<double>&, void*),
                                               void* ctx, double step);

}  // namespace oracle
