#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace nlgqe {

// One attribute/value pair of a dialogue act. Valueless attributes (e.g. a
// bare "request(area)") carry an empty value.
struct Slot {
  std::string attribute;
  std::string value;

  bool operator==(const Slot&) const = default;
};

// Dialogue-act input to an NLG system: main intent plus ordered slots.
struct MeaningRepresentation {
  std::string intent;
  std::vector<Slot> slots;

  bool operator==(const MeaningRepresentation&) const = default;
};

struct TextOutput {
  std::string raw;
  std::vector<std::string> tokens;

  bool operator==(const TextOutput&) const = default;
};

enum class Criterion { kQuality, kNaturalness, kInformativeness };

std::string criterion_name(Criterion c);
Criterion criterion_from_name(const std::string& name);

// One training/evaluation unit. Exactly one of the two shapes holds:
//   rating:  text_a + rating, no text_b
//   ranking: text_a (the human-preferred output) + text_b, no rating
class QEInstance {
 public:
  static QEInstance rating_instance(MeaningRepresentation mr, TextOutput text,
                                    double rating, bool synthetic = false,
                                    std::string source_tag = {});
  static QEInstance ranking_instance(MeaningRepresentation mr, TextOutput better,
                                     TextOutput worse, bool synthetic = false,
                                     std::string source_tag = {});

  const MeaningRepresentation& mr() const { return mr_; }
  const TextOutput& text_a() const { return text_a_; }
  const std::optional<TextOutput>& text_b() const { return text_b_; }
  const std::optional<double>& rating() const { return rating_; }
  bool is_ranking() const { return is_ranking_; }
  bool is_synthetic() const { return is_synthetic_; }
  const std::string& source_tag() const { return source_tag_; }

 private:
  QEInstance() = default;

  MeaningRepresentation mr_;
  TextOutput text_a_;
  std::optional<TextOutput> text_b_;
  std::optional<double> rating_;
  bool is_ranking_ = false;
  bool is_synthetic_ = false;
  std::string source_tag_;
};

struct Dataset {
  std::vector<QEInstance> instances;
  Criterion criterion = Criterion::kQuality;
};

// Lowercasing word/punctuation tokeniser. Punctuation characters become
// standalone tokens, with two exceptions that keep domain tokens intact:
// an apostrophe glues to a following alphanumeric run ("it 's"), and a
// hyphen between alphanumerics stays word-internal ("x-name").
std::vector<std::string> tokenize(const std::string& raw);

TextOutput make_text(const std::string& raw);

// Reserved vocabulary tokens.
inline constexpr const char* kPadToken = "<pad>";
inline constexpr const char* kUnkToken = "<unk>";
inline constexpr const char* kSlotToken = "<slot>";

// Lowercases and maps spaces/slashes to underscores, producing the canonical
// attribute identifier used in linearisations and placeholders.
std::string normalize_attribute(const std::string& attribute);

// Flattens an MR into a token sequence: intent, then per slot the <slot>
// marker, the attribute token and the tokenised value.
std::vector<std::string> linearize_mr(const MeaningRepresentation& mr);

// Canonical textual MR form, e.g. inform(name='x',family_friendly)
// format/parse round-trip exactly; parse also accepts unquoted values.
std::string format_mr(const MeaningRepresentation& mr);
MeaningRepresentation parse_mr(const std::string& text);

class Vocabulary {
 public:
  Vocabulary();

  std::size_t size() const { return tokens_.size(); }
  int pad_id() const { return 0; }
  int unk_id() const { return 1; }
  int slot_id() const { return 2; }

  // UNK fallback for out-of-vocabulary tokens.
  int id(const std::string& token) const;
  const std::string& token(int id) const;
  bool contains(const std::string& token) const;

  std::vector<int> encode(const std::vector<std::string>& tokens) const;

  void add(const std::string& token);
  const std::vector<std::string>& tokens() const { return tokens_; }

  // Hash over the full token list; checkpoints store it to detect mismatch.
  std::uint64_t hash() const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

// Collects every token with corpus frequency >= min_count from MR
// linearisations and texts. Non-reserved entries are ordered by frequency
// (descending), ties broken lexicographically.
Vocabulary build_vocabulary(const std::vector<Dataset>& datasets,
                            std::size_t min_count = 1);

}  // namespace nlgqe
