#pragma once

// Straight-line reference implementations used to cross-check the library.
// They favour obviousness over speed.

#include <map>
#include <string>
#include <vector>

namespace oracle {

// Fuzzy ratios. Inputs are treated as unicode scalars via a naive decoder.

std::size_t lcs(const std::u32string& a, const std::u32string& b);
int ratio(std::size_t lcs_len, std::size_t total);
int indel(const std::string& a, const std::string& b);
int partial(const std::string& a, const std::string& b);
std::string normalize(const std::string& text);  // ASCII only
std::vector<std::string> words(const std::string& text);
int token_sort(const std::string& a, const std::string& b, bool use_partial);
int token_set(const std::string& a, const std::string& b, bool use_partial);
int wratio(const std::string& a, const std::string& b);

// Vector distances with the documented degenerate rules.

double cosine(const std::vector<double>& u, const std::vector<double>& v);
double cityblock(const std::vector<double>& u, const std::vector<double>& v);
double canberra(const std::vector<double>& u, const std::vector<double>& v);
double euclidean(const std::vector<double>& u, const std::vector<double>& v);
double minkowski3(const std::vector<double>& u, const std::vector<double>& v);
double braycurtis(const std::vector<double>& u, const std::vector<double>& v);
double jaccard(const std::vector<double>& u, const std::vector<double>& v);
double skew(const std::vector<double>& x);
double kurtosis(const std::vector<double>& x);

// Minimum transport cost over every integer flow with the given margins,
// summed row-major. Exhaustive, so only for tiny problems.
double transport(const std::vector<long long>& supply, const std::vector<long long>& demand,
                 const std::vector<double>& cost);

using WordVectors = std::map<std::string, std::vector<float>>;

// Word mover's distance by enumeration: bags in first-appearance order,
// unknown words dropped, 1.0 when a side is empty.
double wmd(const std::vector<std::string>& a, const std::vector<std::string>& b, const WordVectors& vectors,
           bool unit);

// Mean of in-vocabulary word vectors (optionally unit-scaled first).
std::vector<double> mean_vector(const std::vector<std::string>& tokens, const WordVectors& vectors, bool unit);

// Best training accuracy of any single-feature threshold rule.
double best_stump_accuracy(const std::vector<std::vector<double>>& x, const std::vector<int>& y);

double log_loss(const std::vector<double>& p, const std::vector<int>& y, double clip = 1e-15);

}  // namespace oracle
