#include "ifrl/synthetic.hpp"

#include <algorithm>
#include <array>
#include <random>
#include <set>

#include "ifrl/error.hpp"
#include "ifrl/text.hpp"

namespace ifrl::synthetic {

namespace {

// Fixed vocabulary. Nothing here may contain the letters z, q, x or j, the
// inclusion keywords, fully uppercase words, asterisks, quotes or angle
// brackets, so every rule stays unsatisfied unless its edit is applied.

constexpr std::array<std::string_view, 4> kRareLetters = {"z", "q", "x", "j"};
constexpr std::array<std::string_view, 4> kLetterSentences = {
    "Zeal and zest fill the zone.",
    "The quiet quill made a quick quip.",
    "The next text sits on the axis.",
    "A jade jar and a jolt of joy.",
};
constexpr std::array<std::string_view, 5> kInclusionKeywords = {"harbor", "lantern", "meadow", "compass",
                                                                 "orchard"};
constexpr std::array<std::string_view, 3> kExclusionKeywords = {"really", "simply", "basically"};
constexpr std::array<std::string_view, 5> kCapsWords = {"KEY", "NOTE", "IMPORTANT", "ALWAYS", "REMEMBER"};
constexpr std::array<std::string_view, 3> kHighlights = {"*first point*", "*second point*", "*third point*"};
constexpr std::array<std::string_view, 4> kBullets = {"- Pack the bag", "- Check the map", "- Fill the bottle",
                                                      "- Lock the door"};
constexpr std::array<std::string_view, 4> kNumbered = {"Wake up early", "Eat a good meal", "Walk to the park",
                                                       "Rest in the shade"};
constexpr std::array<std::string_view, 4> kStartPhrases = {"My answer is as follows:", "Here is my reply:",
                                                           "Sure thing:", "Let me begin:"};
constexpr std::array<std::string_view, 4> kEndPhrases = {"Thank you for reading.", "Let me know if this helps.",
                                                         "That is all for now.", "Have a nice day."};
constexpr std::array<std::string_view, 4> kTitles = {"<<The Long Road>>", "<<A Calm Morning>>",
                                                     "<<Notes From Home>>", "<<Small Steps>>"};
constexpr std::array<std::string_view, 5> kShortSentences = {"Yes.", "Right.", "Good.", "Sure.", "Fine."};
constexpr std::string_view kPaddingRun = "we kept on walking past the old stone wall under a wide open sky";

constexpr std::array<std::string_view, 8> kSubjects = {"The morning", "The old town", "The river", "The garden",
                                                       "Our street", "The small shop", "The hill road",
                                                       "The market"};
constexpr std::array<std::string_view, 8> kAdjectives = {"calm", "bright", "busy", "cool",
                                                         "warm", "still", "green", "pleasant"};
constexpr std::array<std::string_view, 6> kTimes = {"day", "evening", "week", "season", "afternoon", "night"};
constexpr std::array<std::string_view, 6> kSubjects2 = {"the sky", "the air", "the path",
                                                        "the crowd", "the sea", "the field"};
constexpr std::array<std::string_view, 8> kVerbs = {"cleaned", "painted", "opened", "moved",
                                                    "checked", "carried", "planted", "washed"};
constexpr std::array<std::string_view, 6> kNouns = {"table", "fence", "window", "chairs", "baskets", "flowers"};
constexpr std::array<std::string_view, 6> kAdjectives3 = {"good", "long", "restful", "useful", "steady",
                                                          "gentle"};
constexpr std::array<std::string_view, 6> kNouns3 = {"day", "plan", "walk", "trip", "start", "routine"};
constexpr std::array<std::string_view, 6> kSubjects3 = {"my friend", "the teacher", "our neighbor",
                                                        "the clerk", "my brother", "the guide"};

constexpr std::array<std::string_view, 8> kSeeds = {
    "Describe a walk through a small town.",
    "Explain how to plan a weekend trip.",
    "Write a short note about a garden.",
    "Tell a story about a rainy afternoon.",
    "Give advice for a first day at a new school.",
    "Describe the view from a hill road.",
    "Explain how to keep a room tidy.",
    "Write about a visit to a local market.",
};

struct SoftTemplate {
  std::string_view category;
  std::string_view text;
  std::array<std::string_view, 3> markers;
};

constexpr std::array<SoftTemplate, 10> kSoftTemplates = {{
    {"Tone and emotion", "Write in a warm and cheerful tone.",
     {"What a wonderful and happy day this is.", "I feel glad and cheerful about all of this.",
      "It brings a warm smile to my face."}},
    {"Audience-specific", "Address the reader as a young child.",
     {"Little friend, you can try this at home.", "Hey kiddo, let me tell you a story.",
      "Little buddy, this part is fun to learn."}},
    {"Role-based constraint", "Answer as if you were a ship captain.",
     {"As your captain, I say we sail at dawn.", "Ahoy, the crew stands ready on deck.",
      "From the bridge of my ship, I see calm seas."}},
    {"Form and style", "Use a short rhyming couplet somewhere in the answer.",
     {"The sun goes down, the night comes round.", "The bird will sing, the bell will ring.",
      "A hat on a mat sat still like that."}},
    {"Authorial style", "Write in the style of a formal legal notice.",
     {"Hereby the party of the first part agrees to these terms.",
      "Pursuant to the above, all parties shall comply.", "The undersigned hereby affirms the said terms."}},
    {"Pragmatic constraint", "Politely decline any further help at the end.",
     {"I am sorry, but I must decline further help here.", "Sadly I cannot assist beyond this point.",
      "Please forgive me, I will have to stop here."}},
    {"Semantic constraint", "Mention at least one benefit for health.",
     {"This habit is good for your heart and health.", "Doing this helps you sleep better and stay well.",
      "It also lowers stress and supports good health."}},
    {"Task-specific constraint", "End with a short summary of the main idea.",
     {"In summary, the main idea is to keep things plain.", "To sum up, the core point is clear.",
      "In short, that is the heart of the matter."}},
    {"Example constraint", "Include a concrete illustration.",
     {"For instance, a farmer might plant seeds in spring.", "Picture a baker who rises before the sun.",
      "Consider a teacher who plans a lesson each night."}},
    {"Syntactic constraint", "Ask the reader something at the end.",
     {"Have you ever tried this yourself?", "What would you do in this case?",
      "Do you see why this matters?"}},
}};

constexpr std::int64_t kWordThreshold = 320;
constexpr std::int64_t kWordPadding = 340;
constexpr std::int64_t kSentenceThreshold = 28;
constexpr std::int64_t kSentencePadding = 30;

// Rules the mock policy can satisfy on demand. json_format is left out: a
// JSON body cannot carry the other edits.
constexpr std::array<RuleType, 17> kMockRules = {
    RuleType::kAllCapitalLetters,   RuleType::kAllCapsWordFrequency, RuleType::kAllLowercase,
    RuleType::kBulletPointCount,    RuleType::kEndsWithPhrase,       RuleType::kKeywordExclusion,
    RuleType::kKeywordInclusion,    RuleType::kLetterFrequency,      RuleType::kMarkdownHighlightSections,
    RuleType::kNoCommas,            RuleType::kNumberedListCount,    RuleType::kParagraphCount,
    RuleType::kSentenceCount,       RuleType::kStartsWithPhrase,     RuleType::kTitleInDoubleAngularBrackets,
    RuleType::kWordCount,           RuleType::kWrappedInDoubleQuotes,
};

bool conflicts(RuleType a, RuleType b) {
  const auto in = [](RuleType t, std::initializer_list<RuleType> s) {
    return std::find(s.begin(), s.end(), t) != s.end();
  };
  const auto pair = [&](std::initializer_list<RuleType> x, std::initializer_list<RuleType> y) {
    return (in(a, x) && in(b, y)) || (in(b, x) && in(a, y));
  };
  using R = RuleType;
  const std::initializer_list<R> casing = {R::kAllCapitalLetters, R::kAllLowercase, R::kAllCapsWordFrequency};
  if (in(a, casing) && in(b, casing)) return true;
  if (pair({R::kWrappedInDoubleQuotes}, {R::kStartsWithPhrase, R::kEndsWithPhrase})) return true;
  if (pair({R::kAllCapitalLetters, R::kAllLowercase}, {R::kStartsWithPhrase, R::kEndsWithPhrase})) return true;
  return false;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1p-53; }
  template <typename C>
  const auto& pick(const C& c) {
    return c[below(c.size())];
  }
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 gen_;
};

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t hash_text(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

HardRule count_rule(RuleType type, Relation rel, std::int64_t n) { return {type, CountParams{rel, n}}; }

HardRule draw_rule(Rng& rng, RuleType type) {
  using R = RuleType;
  switch (type) {
    case R::kWordCount: return count_rule(type, Relation::kAtLeast, kWordThreshold);
    case R::kSentenceCount: return count_rule(type, Relation::kAtLeast, kSentenceThreshold);
    case R::kParagraphCount: return count_rule(type, Relation::kExactly, 2 + static_cast<int>(rng.below(2)));
    case R::kLetterFrequency:
      return {type, LetterParams{std::string(rng.pick(kRareLetters)), Relation::kAtLeast, 3}};
    case R::kKeywordInclusion: return {type, KeywordParams{std::string(rng.pick(kInclusionKeywords))}};
    case R::kKeywordExclusion: return {type, KeywordParams{std::string(rng.pick(kExclusionKeywords))}};
    case R::kAllCapsWordFrequency:
      return count_rule(type, Relation::kAtLeast, 2 + static_cast<int>(rng.below(2)));
    case R::kMarkdownHighlightSections:
      return count_rule(type, Relation::kAtLeast, 2 + static_cast<int>(rng.below(2)));
    case R::kBulletPointCount: return count_rule(type, Relation::kExactly, 2 + static_cast<int>(rng.below(3)));
    case R::kNumberedListCount: return count_rule(type, Relation::kExactly, 2 + static_cast<int>(rng.below(3)));
    case R::kEndsWithPhrase: return {type, PhraseParams{std::string(rng.pick(kEndPhrases))}};
    case R::kStartsWithPhrase: return {type, PhraseParams{std::string(rng.pick(kStartPhrases))}};
    default: return {type, NoParams{}};
  }
}

const SoftTemplate* find_template(const Constraint& c) {
  for (const auto& t : kSoftTemplates) {
    if (t.text == c.text) return &t;
  }
  return nullptr;
}

std::string base_sentence(Rng& rng, int which) {
  std::string s;
  switch (which) {
    case 0:
      s = std::string(rng.pick(kSubjects)) + " was really " + std::string(rng.pick(kAdjectives)) +
          " that " + std::string(rng.pick(kTimes)) + ", and " + std::string(rng.pick(kSubjects2)) +
          " stayed " + std::string(rng.pick(kAdjectives)) + ".";
      break;
    case 1:
      s = "We simply " + std::string(rng.pick(kVerbs)) + " the " + std::string(rng.pick(kNouns)) +
          ", then we " + std::string(rng.pick(kVerbs)) + " the " + std::string(rng.pick(kNouns)) + ".";
      break;
    default:
      s = "It was basically a " + std::string(rng.pick(kAdjectives3)) + " " + std::string(rng.pick(kNouns3)) +
          ", as " + std::string(rng.pick(kSubjects3)) + " said.";
      break;
  }
  return s;
}

template <typename C>
std::string join(const C& parts, std::string_view sep) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += sep;
    out += p;
  }
  return out;
}

}  // namespace

std::vector<Constraint> draw_constraints(std::uint64_t seed, std::size_t n, double soft_fraction) {
  if (n > kMaxConstraintsPerInstruction) {
    fail(ErrorKind::kValidation, "draw_constraints: n exceeds " + std::to_string(kMaxConstraintsPerInstruction));
  }
  Rng rng(seed);
  std::vector<RuleType> used_rules;
  std::set<std::size_t> used_templates;
  std::vector<Constraint> out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string id = "c" + std::to_string(i + 1);
    std::vector<RuleType> open;
    for (RuleType t : kMockRules) {
      const bool clash = std::any_of(used_rules.begin(), used_rules.end(),
                                     [&](RuleType u) { return u == t || conflicts(u, t); });
      if (!clash) open.push_back(t);
    }
    const bool soft = (rng.unit() < soft_fraction && used_templates.size() < kSoftTemplates.size()) || open.empty();
    if (soft) {
      std::size_t ti = rng.below(kSoftTemplates.size());
      while (used_templates.count(ti) != 0) ti = (ti + 1) % kSoftTemplates.size();
      used_templates.insert(ti);
      out.push_back(Constraint::soft(id, std::string(kSoftTemplates[ti].text),
                                     std::string(kSoftTemplates[ti].category)));
    } else {
      const RuleType t = rng.pick(open);
      used_rules.push_back(t);
      out.push_back(Constraint::hard(id, draw_rule(rng, t)));
    }
  }
  return out;
}

std::vector<Instruction> make_corpus(const CorpusOptions& options) {
  if (options.min_constraints < 1 || options.min_constraints > options.max_constraints ||
      options.max_constraints > kMaxConstraintsPerInstruction) {
    fail(ErrorKind::kValidation, "make_corpus: constraint range must satisfy 1 <= min <= max <= 8");
  }
  Rng rng(mix(options.seed, 17));
  std::vector<Instruction> out;
  const std::size_t span = options.max_constraints - options.min_constraints + 1;
  for (std::size_t i = 0; i < options.num_instructions; ++i) {
    Instruction ins;
    ins.id = options.id_prefix + "-" + std::to_string(i);
    ins.seed_text = std::string(rng.pick(kSeeds));
    const std::size_t n = options.min_constraints + rng.below(span);
    ins.constraints = draw_constraints(mix(options.seed, i), n, options.soft_fraction);
    out.push_back(std::move(ins));
  }
  for (std::size_t i = 0; i < options.num_reasoning; ++i) {
    Instruction ins;
    ins.id = options.id_prefix + "-r" + std::to_string(i);
    const std::size_t a = 2 + rng.below(20);
    const std::size_t b = 2 + rng.below(20);
    ins.seed_text = "What is " + std::to_string(a) + " times " + std::to_string(b) + "?";
    ins.task_kind = TaskKind::kReasoning;
    ins.gold_answer = std::to_string(a * b);
    out.push_back(std::move(ins));
  }
  return out;
}

std::vector<Instruction> make_table_corpus(std::uint64_t seed) {
  constexpr std::array<std::pair<std::size_t, std::size_t>, 4> kShape = {{{1, 61}, {2, 45}, {4, 81}, {5, 2619}}};
  std::vector<Instruction> out;
  std::size_t next = 0;
  for (const auto& [n, count] : kShape) {
    CorpusOptions o;
    o.num_instructions = count;
    o.min_constraints = n;
    o.max_constraints = n;
    o.seed = mix(seed, n);
    o.id_prefix = "t" + std::to_string(n);
    for (auto& ins : make_corpus(o)) {
      ins.id = "table-" + std::to_string(next++);
      out.push_back(std::move(ins));
    }
  }
  return out;
}

std::string mock_response(const Instruction& instruction, const std::vector<bool>& satisfy,
                          std::uint64_t variant) {
  if (instruction.task_kind == TaskKind::kReasoning) {
    return "Let me work through it step by step.\nThe answer is \\boxed{" + instruction.gold_answer + "}";
  }
  if (satisfy.size() != instruction.constraints.size()) {
    fail(ErrorKind::kValidation, "mock_response: mask length does not match constraint count");
  }
  Rng rng(mix(hash_text(instruction.id), variant));
  std::vector<std::string> sentences;
  for (int i = 0; i < 3; ++i) sentences.push_back(base_sentence(rng, i));

  std::vector<std::string> lines;
  std::int64_t paragraphs = 1;
  bool upper = false, lower = false, no_commas = false, wrapped = false;
  std::string prefix, title, suffix;
  std::vector<std::string> excluded;

  for (std::size_t i = 0; i < instruction.constraints.size(); ++i) {
    if (!satisfy[i]) continue;
    const Constraint& c = instruction.constraints[i];
    if (c.is_soft()) {
      const SoftTemplate* t = find_template(c);
      if (t == nullptr) {
        fail(ErrorKind::kValidation, "mock_response: soft constraint '" + c.id + "' has no mock template");
      }
      sentences.emplace_back(rng.pick(t->markers));
      continue;
    }
    const HardRule& rule = *c.rule;
    const auto count = [&] { return std::get<CountParams>(rule.params).count; };
    using R = RuleType;
    switch (rule.type) {
      case R::kKeywordInclusion:
        sentences.push_back("We walked past the " + std::get<KeywordParams>(rule.params).keyword + " before noon.");
        break;
      case R::kKeywordExclusion: excluded.push_back(std::get<KeywordParams>(rule.params).keyword); break;
      case R::kLetterFrequency: {
        const auto& p = std::get<LetterParams>(rule.params);
        const auto it = std::find(kRareLetters.begin(), kRareLetters.end(), p.letter);
        if (it == kRareLetters.end() || p.count > 3 || p.relation != Relation::kAtLeast) {
          fail(ErrorKind::kValidation, "mock_response: unsupported letter_frequency parameters");
        }
        sentences.emplace_back(kLetterSentences[static_cast<std::size_t>(it - kRareLetters.begin())]);
        break;
      }
      case R::kMarkdownHighlightSections: {
        std::vector<std::string_view> spans(kHighlights.begin(), kHighlights.begin() + count());
        sentences.push_back("Keep in mind the " + join(spans, " and the ") + " today.");
        break;
      }
      case R::kAllCapsWordFrequency: {
        std::vector<std::string_view> words(kCapsWords.begin(), kCapsWords.begin() + count());
        sentences.push_back("Please treat this as " + join(words, " ") + " advice.");
        break;
      }
      case R::kBulletPointCount:
        for (std::int64_t b = 0; b < count(); ++b) lines.emplace_back(kBullets[static_cast<std::size_t>(b)]);
        break;
      case R::kNumberedListCount:
        for (std::int64_t b = 0; b < count(); ++b) {
          lines.push_back(std::to_string(b + 1) + ". " + std::string(kNumbered[static_cast<std::size_t>(b)]));
        }
        break;
      case R::kSentenceCount:
        for (std::int64_t s = 0; s < kSentencePadding; ++s) sentences.emplace_back(rng.pick(kShortSentences));
        break;
      case R::kWordCount: {
        std::string pad = "Then";
        std::int64_t words = 1;
        const auto run = text::words(kPaddingRun);
        for (std::size_t w = 0; words < kWordPadding; ++w, ++words) {
          pad += " ";
          pad += run[w % run.size()];
        }
        sentences.push_back(pad + ".");
        break;
      }
      case R::kParagraphCount: paragraphs = count(); break;
      case R::kAllCapitalLetters: upper = true; break;
      case R::kAllLowercase: lower = true; break;
      case R::kNoCommas: no_commas = true; break;
      case R::kWrappedInDoubleQuotes: wrapped = true; break;
      case R::kStartsWithPhrase: prefix = std::get<PhraseParams>(rule.params).phrase; break;
      case R::kEndsWithPhrase: suffix = std::get<PhraseParams>(rule.params).phrase; break;
      case R::kTitleInDoubleAngularBrackets: title = std::string(rng.pick(kTitles)); break;
      case R::kJsonFormat:
        fail(ErrorKind::kValidation, "mock_response: json_format is not supported by the mock policy");
    }
  }

  // Filler sentences first, then the edits, split into the paragraph count.
  const std::size_t n = sentences.size();
  const auto parts = static_cast<std::size_t>(paragraphs);
  std::vector<std::string> blocks;
  for (std::size_t b = 0; b < parts; ++b) {
    blocks.push_back(join(std::vector<std::string>(sentences.begin() + static_cast<std::ptrdiff_t>(b * n / parts),
                                                   sentences.begin() + static_cast<std::ptrdiff_t>((b + 1) * n / parts)),
                          " "));
  }
  std::string body = join(blocks, "\n\n");
  for (const auto& l : lines) body += "\n" + l;
  for (const auto& kw : excluded) body = text::remove_whole_word(body, kw);
  if (no_commas) body.erase(std::remove(body.begin(), body.end(), ','), body.end());
  if (upper) body = text::upper(body);
  if (lower) body = text::lower(body);
  if (!title.empty()) body = (upper ? text::upper(title) : lower ? text::lower(title) : title) + "\n" + body;
  if (!prefix.empty()) body = prefix + " " + body;
  if (!suffix.empty()) body += "\n" + suffix;
  if (wrapped) body = "\"" + body + "\"";
  return body;
}

std::vector<Response> mock_level_responses(const Instruction& instruction) {
  std::vector<Response> out;
  if (instruction.task_kind == TaskKind::kReasoning) {
    out.push_back({instruction.id, 0, mock_response(instruction, {}, 0), ResponseSource::kMock});
    return out;
  }
  const std::size_t n = instruction.constraints.size();
  for (std::size_t k = 0; k <= n; ++k) {
    std::vector<bool> mask(n, false);
    for (std::size_t i = 0; i < k; ++i) mask[i] = true;
    out.push_back({instruction.id, k, mock_response(instruction, mask, k), ResponseSource::kMock});
  }
  return out;
}

std::vector<Response> mock_corpus_responses(std::span<const Instruction> instructions) {
  std::vector<Response> out;
  for (const auto& ins : instructions) {
    auto r = mock_level_responses(ins);
    out.insert(out.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
  }
  return out;
}

nlohmann::json to_json(const Rollout& r) {
  nlohmann::json j = {{"group_id", r.group_id}, {"response", r.response}};
  if (!r.gold_answer.empty()) {
    j["gold_answer"] = r.gold_answer;
  } else {
    nlohmann::json cs = nlohmann::json::array();
    for (const auto& c : r.constraints) cs.push_back(ifrl::to_json(c));
    j["constraints"] = std::move(cs);
  }
  return j;
}

std::vector<Rollout> mock_rollouts(std::span<const Instruction> instructions, std::size_t group_size) {
  if (group_size < 2) fail(ErrorKind::kValidation, "mock_rollouts: group_size must be at least 2");
  std::vector<Rollout> out;
  for (const auto& ins : instructions) {
    for (std::size_t j = 0; j < group_size; ++j) {
      Rollout r;
      r.group_id = ins.id;
      if (ins.task_kind == TaskKind::kReasoning) {
        r.gold_answer = ins.gold_answer;
        const std::string answer = j % 2 == 0 ? ins.gold_answer : ins.gold_answer + "1";
        r.response = "Let me work through it step by step.\nThe answer is \\boxed{" + answer + "}";
      } else {
        const std::size_t n = ins.constraints.size();
        const std::size_t k = (j * n * 2 + (group_size - 1)) / (2 * (group_size - 1));
        std::vector<bool> mask(n, false);
        for (std::size_t i = 0; i < k && i < n; ++i) mask[i] = true;
        r.constraints = ins.constraints;
        r.response = mock_response(ins, mask, 100 + j);
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<LabeledPair> separable_pairs(std::size_t count, std::uint64_t seed) {
  static constexpr std::array<std::string_view, 16> kFiller = {
      "the", "dog", "ran", "across", "a", "green", "field", "while", "birds", "sang", "in", "tall", "trees",
      "near", "our", "house"};
  Rng rng(mix(seed, 99));
  const Constraint c = Constraint::soft("c1", "Mention cats in the response.", "Semantic constraint");
  std::vector<LabeledPair> out;
  for (std::size_t i = 0; i < count; ++i) {
    const int label = i % 2 == 0 ? 1 : 0;
    std::vector<std::string> words;
    const std::size_t len = 6 + rng.below(8);
    for (std::size_t w = 0; w < len; ++w) words.emplace_back(rng.pick(kFiller));
    if (label == 1) words.insert(words.begin() + static_cast<std::ptrdiff_t>(rng.below(len + 1)), "cats");
    std::string text = join(words, " ") + ".";
    text[0] = text::to_upper(text[0]);
    out.push_back({text, c, label});
  }
  return out;
}

std::vector<PreferenceGroup> preference_groups(std::size_t count, std::uint64_t seed, double soft_fraction) {
  std::vector<PreferenceGroup> out;
  Rng rng(mix(seed, 7));
  for (std::size_t g = 0; g < count; ++g) {
    Instruction ins;
    ins.id = "pg-" + std::to_string(seed) + "-" + std::to_string(g);
    ins.seed_text = std::string(rng.pick(kSeeds));
    ins.constraints = draw_constraints(mix(seed, 1000 + g), kPreferenceGroupSize, soft_fraction);
    PreferenceGroup pg;
    pg.id = ins.id;
    pg.constraints = ins.constraints;
    for (std::size_t j = 1; j <= kPreferenceGroupSize; ++j) {
      std::vector<std::size_t> idx(kPreferenceGroupSize);
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      rng.shuffle(idx);
      std::vector<bool> mask(kPreferenceGroupSize, false);
      for (std::size_t i = 0; i < j; ++i) mask[idx[i]] = true;
      pg.responses.push_back({mock_response(ins, mask, 50 + j), static_cast<int>(kPreferenceGroupSize + 1 - j)});
    }
    rng.shuffle(pg.responses);
    out.push_back(std::move(pg));
  }
  return out;
}

std::vector<std::string> vocabulary_samples() {
  std::vector<std::string> out;
  const auto add = [&](const auto& list) {
    for (const auto& s : list) out.emplace_back(s);
  };
  add(kCapsWords);
  add(kHighlights);
  add(kBullets);
  add(kNumbered);
  add(kStartPhrases);
  add(kEndPhrases);
  add(kTitles);
  add(kShortSentences);
  add(kSubjects);
  add(kAdjectives);
  add(kTimes);
  add(kSubjects2);
  add(kVerbs);
  add(kNouns);
  add(kAdjectives3);
  add(kNouns3);
  add(kSubjects3);
  out.emplace_back(kPaddingRun);
  for (const auto& t : kSoftTemplates) add(t.markers);
  return out;
}

}  // namespace ifrl::synthetic
