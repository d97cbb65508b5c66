#pragma once

// Command-line front end: filter, match, gen, check.
// Exit codes: 0 ok, 1 property violation, 2 parse error, 3 semantic error.

#include <chrono>
#include <cmath>
#include <deque>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "CLI11.hpp"
#include "tfilter/tfilter.hpp"

namespace tfilter::cli {

inline constexpr int kOk = 0;
inline constexpr int kViolation = 1;
inline constexpr int kParseError = 2;
inline constexpr int kSemanticError = 3;

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open '" + path + "'");
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

// Peak resident set size in KiB, or 0 where /proc is unavailable.
inline long peak_rss_kb() {
  std::ifstream f("/proc/self/status");
  std::string line;
  while (std::getline(f, line))
    if (line.rfind("VmHWM:", 0) == 0) return std::stol(line.substr(6));
  return 0;
}

using Clock = std::chrono::steady_clock;
inline double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct OutLine {
  std::string label;
  std::optional<double> time;
};

struct OutLineIsBottom {
  bool operator()(const OutLine& l) const { return l.label == kBottomToken; }
};

enum class Suppress { None, Plain, Binary };

// Writes masked events, applying run suppression if requested, and keeps the
// counters reported by --stats.
class Emitter {
 public:
  Emitter(std::ostream& out, Suppress mode) : out_(out), mode_(mode) {}

  void push(OutLine l) {
    ++raw_;
    const bool bottom = l.label == kBottomToken;
    if (bottom) ++masked_;
    switch (mode_) {
      case Suppress::None:
        write(l);
        break;
      case Suppress::Plain:
        plain_.push(l, [&](const OutLine& x) { write(x); });
        break;
      case Suppress::Binary:
        if (bottom) {
          if (run_ == 0) run_first_ = l.time;
          run_last_ = l.time;
          ++run_;
        } else {
          close_binary_run();
          write(l);
        }
        break;
    }
  }

  void finish() {
    if (mode_ == Suppress::Plain) plain_.flush([&](const OutLine& x) { write(x); });
    if (mode_ == Suppress::Binary) close_binary_run();
    out_.flush();
  }

  void flush() { out_.flush(); }

  std::size_t raw() const { return raw_; }
  std::size_t masked() const { return masked_; }
  std::size_t written() const { return written_; }

 private:
  void write(const OutLine& l) {
    out_ << l.label;
    if (l.time) out_ << '\t' << format_time(*l.time);
    out_ << '\n';
    ++written_;
  }

  // One line per maximal ⊥ run: `_ [first last] xK`.
  void close_binary_run() {
    if (run_ == 0) return;
    out_ << kBottomToken;
    if (run_first_) out_ << '\t' << format_time(*run_first_) << '\t' << format_time(*run_last_);
    out_ << "\tx" << run_ << '\n';
    ++written_;
    run_ = 0;
  }

  std::ostream& out_;
  Suppress mode_;
  RunSuppressor<OutLine, OutLineIsBottom> plain_;
  std::size_t run_ = 0;
  std::optional<double> run_first_, run_last_;
  std::size_t raw_ = 0, masked_ = 0, written_ = 0;
};

struct FilterArgs {
  std::string pattern;
  std::size_t buffer = 0;
  bool timed = false;
  std::string suppress;
  bool otf = false;
  std::string stats;
  std::string input;
};

struct StatsRecord {
  std::size_t input_length = 0, output_length = 0, output_length_raw = 0, masked = 0, states = 0;
  double build_ms = 0, filter_ms = 0;

  void write(std::ostream& o) const {
    o << "input_length\t" << input_length << "\n"
      << "output_length\t" << output_length << "\n"
      << "output_length_raw\t" << output_length_raw << "\n"
      << "masked\t" << masked << "\n"
      << "states\t" << states << "\n"
      << "build_ms\t" << build_ms << "\n"
      << "filter_ms\t" << filter_ms << "\n"
      << "peak_rss_kb\t" << peak_rss_kb() << "\n";
  }
};

template <class Stepper>
void filter_untimed(UntimedStream<Stepper>& stream, const Alphabet& alphabet, std::istream& in, Emitter& em,
                    StatsRecord& st, const std::function<void()>& on_step) {
  std::deque<WordLine> pending;  // the N events whose verdict is not known yet
  std::size_t line = 0;
  auto emit = [&](Symbol b) {
    auto& src = pending.front();
    em.push({b == kBottom ? std::string(kBottomToken) : src.label, src.time});
    pending.pop_front();
  };
  std::optional<double> last;
  while (auto l = read_word_line(in, line)) {
    if (l->label == kBottomToken) throw InputError(tfilter::detail::at_line(line) + "input may not contain ⊥");
    const Symbol a = alphabet.symbol(l->label);
    if (l->time) {
      if (!(*l->time > last.value_or(0.0)))
        throw InputError(tfilter::detail::at_line(line) + "timestamps must be positive and strictly increasing");
      last = l->time;
    }
    ++st.input_length;
    pending.push_back(std::move(*l));
    if (auto b = stream.push(a)) {
      emit(*b);
      em.flush();
    }
    on_step();
  }
  stream.finish(emit);
}

inline int cmd_filter(const FilterArgs& a, std::istream& stdin_, std::ostream& out) {
  if (a.buffer == 0) throw InputError("--buffer must be a positive integer");
  const Automaton pattern = parse_automaton(read_file(a.pattern));
  std::ifstream file;
  if (!a.input.empty()) {
    file.open(a.input);
    if (!file) throw InputError("cannot open '" + a.input + "'");
  }
  std::istream& in = a.input.empty() ? stdin_ : file;
  const Suppress mode = a.suppress.empty() ? Suppress::None : a.suppress == "binary" ? Suppress::Binary : Suppress::Plain;
  Emitter em(out, mode);
  StatsRecord st;
  auto t0 = Clock::now();

  if (!a.timed) {
    const auto* nfa = std::get_if<Nfa>(&pattern);
    if (!nfa) throw InputError("timed-automaton pattern requires --timed");
    if (a.otf) {
      UntimedStream<OnTheFlyStepper> stream{OnTheFlyStepper(*nfa, a.buffer)};
      std::unordered_set<NonBufferState, NonBufferStateHash> seen{stream.stepper().state()};
      st.build_ms = ms_since(t0);
      t0 = Clock::now();
      const bool track = !a.stats.empty();
      filter_untimed(stream, nfa->alphabet(), in, em, st, [&] {
        if (track) seen.insert(stream.stepper().state());
      });
      st.states = seen.size();
    } else {
      const UntimedFilter f(*nfa, a.buffer);
      st.build_ms = ms_since(t0);
      st.states = f.state_count();
      t0 = Clock::now();
      UntimedStream<TableStepper> stream{TableStepper(f)};
      filter_untimed(stream, nfa->alphabet(), in, em, st, [] {});
    }
  } else {
    const auto* ta = std::get_if<TimedAutomaton>(&pattern);
    if (!ta) throw InputError("--timed requires a timed-automaton pattern");
    const TimedFilter f(*ta, a.buffer, a.otf ? Expansion::OnDemand : Expansion::Full);
    st.build_ms = ms_since(t0);
    t0 = Clock::now();
    TimedFilterRun run(f);
    std::deque<WordLine> pending;
    auto emit = [&](Verdict v) {
      auto& src = pending.front();
      em.push({v == Verdict::Pass ? src.label : std::string(kBottomToken), src.time});
      pending.pop_front();
    };
    std::size_t line = 0;
    while (auto l = read_word_line(in, line)) {
      if (!l->time) throw ParseError(tfilter::detail::at_line(line) + "timed mode needs 'label<TAB>timestamp'");
      if (l->label == kBottomToken) throw InputError(tfilter::detail::at_line(line) + "input may not contain ⊥");
      const Symbol s = f.alphabet().symbol(l->label);
      const double t = *l->time;
      ++st.input_length;
      pending.push_back(std::move(*l));
      try {
        if (auto v = run.push(s, t)) {
          emit(*v);
          em.flush();
        }
      } catch (const InputError& e) {
        throw InputError(tfilter::detail::at_line(line) + e.what());
      }
    }
    run.finish(emit);
    st.states = f.state_count();
  }
  em.finish();
  st.filter_ms = ms_since(t0);
  st.output_length = em.written();
  st.output_length_raw = em.raw();
  st.masked = em.masked();
  if (!a.stats.empty()) {
    std::ofstream s(a.stats);
    if (!s) throw InputError("cannot write '" + a.stats + "'");
    st.write(s);
  }
  return kOk;
}

inline int cmd_match(const std::string& pattern_path, bool timed, const std::string& input, std::istream& stdin_,
                     std::ostream& out) {
  const Automaton pattern = parse_automaton(read_file(pattern_path));
  const std::string text = input.empty() ? std::string(std::istreambuf_iterator<char>(stdin_), {}) : read_file(input);
  MatchSet m;
  if (timed) {
    const auto* ta = std::get_if<TimedAutomaton>(&pattern);
    if (!ta) throw InputError("--timed requires a timed-automaton pattern");
    m = timed_index_match(parse_timed_word(text, ta->alphabet()), *ta);
  } else {
    const auto* nfa = std::get_if<Nfa>(&pattern);
    if (!nfa) throw InputError("timed-automaton pattern requires --timed");
    m = untimed_match_set(parse_untimed_word(text, nfa->alphabet()), *nfa);
  }
  for (const auto& [i, j] : m) out << i << ' ' << j << '\n';
  return kOk;
}

inline int cmd_gen(const std::vector<std::string>& labels, std::size_t length, std::uint64_t seed, bool timed,
                   double rate, std::ostream& out) {
  const Alphabet alphabet(labels);
  if (alphabet.size() == 0) throw InputError("--alphabet must name at least one label");
  if (!(rate > 0) || !std::isfinite(rate)) throw InputError("--rate must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::exponential_distribution<double> gap(rate);
  double t = 0.0;
  for (std::size_t i = 0; i < length; ++i) {
    out << alphabet.labels()[pick(rng)];
    if (timed) {
      const double next = t + gap(rng);
      t = next > t ? next : std::nextafter(t, INFINITY);
      out << '\t' << format_time(t);
    }
    out << '\n';
  }
  return kOk;
}

inline int cmd_check(const std::string& suite, std::size_t trials, std::uint64_t seed, std::size_t max_length,
                     std::ostream& out) {
  const auto t0 = Clock::now();
  SuiteReport r;
  if (suite == "soundness") r = soundness_suite(seed, trials);
  else if (suite == "completeness") r = completeness_suite(seed, trials);
  else if (suite == "monotonicity") r = monotonicity_suite(seed, trials);
  else if (suite == "timed-soundness") r = timed_soundness_suite(seed, trials);
  else if (suite == "inclusion") r = inclusion_suite(seed, trials);
  else if (trials == 0) r = SuiteReport{"lemma1", 0, 0, {}};
  else {
    const auto p = lemma1_patterns();
    r = lemma1_suite(p, max_length);
  }
  out << "suite\t" << r.name << "\n"
      << "trials\t" << r.trials << "\n"
      << "violations\t" << r.violations << "\n"
      << "elapsed_ms\t" << ms_since(t0) << "\n";
  if (!r.ok()) {
    out << "counterexample:\n" << r.counterexample;
    return kViolation;
  }
  return kOk;
}

}  // namespace detail

// args excludes the program name.
inline int run_cli(std::vector<std::string> args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Streaming pattern-preserving log filters"};
  app.require_subcommand(1);

  detail::FilterArgs fa;
  auto* filter = app.add_subcommand("filter", "Mask events that cannot belong to any pattern match");
  filter->add_option("--pattern", fa.pattern, "Pattern automaton file")->required();
  filter->add_option("--buffer", fa.buffer, "Buffer size N")->required();
  filter->add_flag("--timed", fa.timed, "Timed pattern and timed input");
  filter->add_flag("--suppress{plain}", fa.suppress, "Collapse runs of masked events (=binary for run-length lines)")
      ->check(CLI::IsMember({"plain", "binary"}));
  filter->add_flag("--otf", fa.otf, "Build filter states on demand");
  filter->add_option("--stats", fa.stats, "Write key<TAB>value statistics to FILE");
  filter->add_option("--input", fa.input, "Read the word from FILE instead of standard input");

  std::string m_pattern, m_input;
  bool m_timed = false;
  auto* match = app.add_subcommand("match", "Print the match set of a word");
  match->add_option("--pattern", m_pattern, "Pattern automaton file")->required();
  match->add_flag("--timed", m_timed, "Timed pattern and timed input");
  match->add_option("--input", m_input, "Word file (default: standard input)");

  std::vector<std::string> g_alphabet;
  std::size_t g_length = 0;
  std::uint64_t g_seed = 0;
  bool g_timed = false;
  double g_rate = 1.0;
  auto* gen = app.add_subcommand("gen", "Generate a random (timed) word");
  gen->add_option("--alphabet", g_alphabet, "Comma-separated labels")->required()->delimiter(',');
  gen->add_option("--length", g_length, "Number of events")->required();
  gen->add_option("--seed", g_seed, "Random seed")->required();
  gen->add_flag("--timed", g_timed, "Emit timestamps");
  gen->add_option("--rate", g_rate, "Mean events per time unit (timed)")->check(CLI::PositiveNumber);

  std::string c_suite;
  std::size_t c_trials = 100, c_max_length = 7;
  std::uint64_t c_seed = 1;
  auto* check = app.add_subcommand("check", "Run a randomized property suite against the oracles");
  check->add_option("--suite", c_suite, "Suite name")
      ->required()
      ->check(CLI::IsMember({"soundness", "completeness", "monotonicity", "timed-soundness", "lemma1", "inclusion"}));
  check->add_option("--trials", c_trials, "Number of trials (lemma1: 0 skips, otherwise exhaustive)");
  check->add_option("--seed", c_seed, "Random seed");
  check->add_option("--max-length", c_max_length, "Longest word for the exhaustive lemma1 suite");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kParseError;
  }

  try {
    if (*filter) return detail::cmd_filter(fa, in, out);
    if (*match) return detail::cmd_match(m_pattern, m_timed, m_input, in, out);
    if (*gen) return detail::cmd_gen(g_alphabet, g_length, g_seed, g_timed, g_rate, out);
    return detail::cmd_check(c_suite, c_trials, c_seed, c_max_length, out);
  } catch (const ParseError& e) {
    out.flush();
    err << "parse error: " << e.what() << "\n";
    return kParseError;
  } catch (const InputError& e) {
    out.flush();
    err << "error: " << e.what() << "\n";
    return kSemanticError;
  }
}

}  // namespace tfilter::cli
