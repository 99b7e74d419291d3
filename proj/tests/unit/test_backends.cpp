#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <sys/wait.h>

#include "stverif/backends.hpp"
#include "stverif/cex.hpp"
#include "stverif/engine.hpp"
#include "support/build.hpp"

using namespace stverif;
namespace fs = std::filesystem;

namespace {

VerificationProblem first_problem(const std::string& source) {
  testsup::Built b = testsup::build_source(source);
  REQUIRE(b.ok);
  REQUIRE_FALSE(b.problems.empty());
  return b.problems.front();
}

// Same problem but with the pre-inline network, call sites intact.
VerificationProblem pre_inline_problem(const std::string& source) {
  testsup::Built b = testsup::build_source(source);
  REQUIRE(b.ok);
  REQUIRE_FALSE(b.problems.empty());
  VerificationProblem p = b.problems.front();
  p.net = *b.net;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void check_golden(const std::string& name, const std::string& text) {
  fs::path path = fs::path(STVERIF_TEST_DIR) / "golden" / name;
  if (std::getenv("STVERIF_REGEN_GOLDEN")) {
    fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    f << text;
    REQUIRE(f.good());
    return;
  }
  INFO("golden file " << path
                      << "; set STVERIF_REGEN_GOLDEN=1 to regenerate");
  REQUIRE(fs::exists(path));
  CHECK(text == slurp(path));
}

std::string em(const EmittedModel& m, const std::string& source_name) {
  const std::string* n = m.map.emitted(source_name);
  REQUIRE(n != nullptr);
  return *n;
}

std::string loc_lit(const Automaton& a, int id) {
  return backend_detail::loc_literal(a.loc(id));
}

int anchor_loc_id(const VerificationProblem& p) {
  for (const Location& l : p.net.main.locations)
    if (l.role == LocRole::AssertionAnchor &&
        l.anchor_id == p.property.anchor_id)
      return l.id;
  FAIL("no anchor location for the property");
  return -1;
}

size_t count_occurrences(const std::string& text, const std::string& needle) {
  size_t n = 0;
  for (size_t at = text.find(needle); at != std::string::npos;
       at = text.find(needle, at + needle.size()))
    ++n;
  return n;
}

// --- fixture programs ---------------------------------------------------------

const std::string kCounterProgram = R"(
PROGRAM Main
VAR_INPUT a, b : BOOL; END_VAR
VAR_OUTPUT q : BOOL; END_VAR
VAR c : INT := 0; END_VAR
  IF a AND NOT b THEN
    c := c + 1;
  ELSIF b THEN
    c := 0;
  END_IF;
  q := c >= 3;
  //#ASSERT NOT q
END_PROGRAM
)";

const std::string kConveyorProgram = R"(
PROGRAM Main
VAR_INPUT n : INT; go : BOOL; END_VAR
VAR buf : ARRAY[1..3] OF INT; i : INT; total : DINT := 0; END_VAR
  FOR i := 1 TO 3 DO
    buf[i] := n + i;
  END_FOR;
  i := 1;
  WHILE i <= 3 DO
    total := total + buf[i];
    i := i + 1;
  END_WHILE;
  IF NOT go THEN
    RETURN;
  END_IF;
  CASE i OF
    4: total := total + 1;
  ELSE
    total := 0;
  END_CASE;
  //#ASSERT total < 100000
END_PROGRAM
)";

const std::string kDynReadProgram = R"(
PROGRAM Main
VAR_INPUT k : INT; END_VAR
VAR buf : ARRAY[0..3] OF INT; x : INT; END_VAR
  x := buf[k];
  //#ASSERT x = x
END_PROGRAM
)";

const std::string kDynWriteProgram = R"(
PROGRAM Main
VAR_INPUT k : INT; END_VAR
VAR buf : ARRAY[0..3] OF INT; END_VAR
  buf[k] := 1;
  //#ASSERT buf[0] >= 0 OR buf[0] < 0
END_PROGRAM
)";

const std::string kOobProgram = R"(
PROGRAM Main
VAR buf : ARRAY[1..3] OF INT; x : INT; END_VAR
  x := buf[9];
  //#ASSERT x = x
END_PROGRAM
)";

const std::string kCalleeProgram = R"(
FUNCTION_BLOCK Guard
VAR_INPUT v : BOOL; END_VAR
VAR_OUTPUT ok : BOOL; END_VAR
  ok := v;
END_FUNCTION_BLOCK
PROGRAM Main
VAR_INPUT a : BOOL; END_VAR
VAR_OUTPUT q : BOOL; END_VAR
  Guard(v := a, ok => q);
  //#ASSERT NOT q
END_PROGRAM
)";

// Fault-free programs for the compiled-model agreement check. Each one
// leans on semantics the emitter must reproduce exactly: wrapping, short
// circuits, loop shapes, arrays, selector ranges, width mixing.
struct AgreementProgram {
  const char* name;
  const char* source;
};

const AgreementProgram kAgreementPrograms[] = {
    {"latching counter", R"(
PROGRAM Main
VAR_INPUT a, b : BOOL; END_VAR
VAR c : INT := 0; q : BOOL; END_VAR
  IF a AND NOT b THEN
    c := c + 1;
  END_IF;
  IF c >= 3 THEN
    q := TRUE;
  END_IF;
  //#ASSERT NOT q
END_PROGRAM
)"},
    {"array sum with wrapping", R"(
PROGRAM Main
VAR_INPUT n : INT; END_VAR
VAR arr : ARRAY[1..4] OF INT; s, i : INT; END_VAR
  FOR i := 1 TO 4 DO
    arr[i] := n + i;
  END_FOR;
  s := 0;
  FOR i := 1 TO 4 DO
    s := s + arr[i];
  END_FOR;
  //#ASSERT s < 30000
END_PROGRAM
)"},
    {"selector and bounded search", R"(
PROGRAM Main
VAR_INPUT k : INT; go : BOOL; END_VAR
VAR j, acc : INT; mode : INT; END_VAR
  mode := k MOD 3;
  CASE mode OF
    0: acc := acc + 1;
    1..2: acc := acc - 1;
  ELSE
    acc := 0;
  END_CASE;
  j := 0;
  WHILE TRUE DO
    j := j + 1;
    IF j >= 5 OR NOT go THEN
      EXIT;
    END_IF;
  END_WHILE;
  //#ASSERT acc > -4
END_PROGRAM
)"},
    {"guarded division", R"(
PROGRAM Main
VAR_INPUT n : INT; en : BOOL; END_VAR
VAR q : INT; ok : BOOL; END_VAR
  ok := (n <> 0) AND (100 / n >= -100);
  IF ok AND en THEN
    q := 100 / n;
  ELSE
    q := 0;
  END_IF;
  //#ASSERT q <= 100
END_PROGRAM
)"},
    {"width mixing and repeat", R"(
PROGRAM Main
VAR_INPUT d : INT; END_VAR
VAR big : DINT; r, t : INT; END_VAR
  big := big + d;
  r := d MOD 7;
  t := -r;
  REPEAT
    t := t + 1;
  UNTIL t >= 3
  END_REPEAT;
  //#ASSERT (big < 1000000) OR (t = 3)
END_PROGRAM
)"},
    {"early return from a loop", R"(
PROGRAM Main
VAR_INPUT go : BOOL; n : INT; END_VAR
VAR i, s : INT; END_VAR
  s := 0;
  FOR i := 1 TO 4 DO
    s := s + n;
    IF go AND (s > 50) THEN
      RETURN;
    END_IF;
  END_FOR;
  //#ASSERT s <= 200
END_PROGRAM
)"},
};

int64_t draw_value(std::mt19937& rng, Scalar t) {
  if (t == Scalar::Bool) return std::uniform_int_distribution<int>(0, 1)(rng);
  if (std::uniform_int_distribution<int>(0, 4)(rng) == 0) {
    static const int32_t extremes[] = {32767, -32768, 30000, -30000, 0};
    return extremes[std::uniform_int_distribution<size_t>(0, 4)(rng)];
  }
  return std::uniform_int_distribution<int>(-50, 50)(rng);
}

const char* kNondetShim = R"(#include <stdio.h>
#include <stdlib.h>
typedef signed short stv_int16;
typedef signed int stv_int32;
static FILE* f;
static unsigned long pos;
static long next_val(void) {
  long v;
  if (!f) {
    const char* p = getenv("STVERIF_SCRIPT");
    if (!p || !(f = fopen(p, "r"))) exit(8);
  }
  if (fscanf(f, "%ld", &v) != 1) exit(0);
  ++pos;
  return v;
}
_Bool nondet_bool(void) { return next_val() != 0; }
stv_int16 nondet_int16(void) { return (stv_int16)next_val(); }
stv_int32 nondet_int32(void) { return (stv_int32)next_val(); }
void __CPROVER_assume(_Bool c) { if (!c) exit(9); }
void __CPROVER_assert(_Bool c, const char* m) {
  (void)m;
  if (!c) { printf("ASSERTFAIL pos=%lu\n", pos); exit(7); }
}
)";

int run_command(const std::string& cmd) {
  int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : 128;
}

}  // namespace

// --- name mapping ---------------------------------------------------------------

TEST_CASE("name mapping is bijective and avoids reserved words") {
  NameMap m;
  m.reserve("next");
  m.reserve("esac");

  CHECK(m.add("plain") == "plain");
  CHECK(m.add("plain") == "plain");  // idempotent
  CHECK(m.add("next") == "next_2");
  CHECK(m.add("esac") == "esac_2");
  CHECK(m.add("Flip#1.x") == "Flip_1_x");
  CHECK(m.add("3x") == "v3x");

  // a source name that collides with a sanitized one gets a suffix
  std::string clash = m.add("Flip_1_x");
  CHECK(clash != "Flip_1_x");
  CHECK(*m.source_of(clash) == "Flip_1_x");

  for (const auto& [source, emitted] : m.forward()) {
    REQUIRE(m.source_of(emitted) != nullptr);
    CHECK(*m.source_of(emitted) == source);
    REQUIRE(m.emitted(source) != nullptr);
    CHECK(*m.emitted(source) == emitted);
  }
  CHECK(m.forward().size() == m.reverse().size());
}

// --- smv emission ---------------------------------------------------------------

TEST_CASE("smv emission matches its golden file and is deterministic") {
  VerificationProblem p = first_problem(kCounterProgram);
  EmittedModel m1 = emit_smv(p);
  EmittedModel m2 = emit_smv(p);
  CHECK(m1.text == m2.text);
  CHECK(m1.format == "smv");
  CHECK(m1.input_names == std::vector<std::string>{"a", "b"});
  CHECK(m1.persistent_names == std::vector<std::string>{"a", "b", "q", "c"});
  check_golden("counter.smv", m1.text);
}

TEST_CASE("smv emission rejects what the encoding cannot express") {
  SECTION("dynamic array read") {
    VerificationProblem p = first_problem(kDynReadProgram);
    try {
      emit_smv(p);
      FAIL("expected an unsupported-feature error");
    } catch (const UnsupportedFeature& e) {
      CHECK(std::string(e.what()).find("dynamic array index") !=
            std::string::npos);
      CHECK(e.span.hi > e.span.lo);  // names the offending source bytes
    }
  }
  SECTION("dynamic array write") {
    VerificationProblem p = first_problem(kDynWriteProgram);
    CHECK_THROWS_AS(emit_smv(p), UnsupportedFeature);
  }
  SECTION("literal index outside the declared range") {
    VerificationProblem p = first_problem(kOobProgram);
    try {
      emit_smv(p);
      FAIL("expected an unsupported-feature error");
    } catch (const UnsupportedFeature& e) {
      CHECK(std::string(e.what()).find("outside the declared range") !=
            std::string::npos);
    }
  }
}

TEST_CASE("smv emission requires an inlined network") {
  VerificationProblem p = pre_inline_problem(kCalleeProgram);
  REQUIRE(p.net.main.has_call_sites());
  CHECK_THROWS_AS(emit_smv(p), std::invalid_argument);
  CHECK_THROWS_AS(emit_c(p), std::invalid_argument);
}

TEST_CASE("smv branch priority and input latching are explicit") {
  VerificationProblem p = first_problem(kCounterProgram);
  EmittedModel m = emit_smv(p);

  // inputs are latched from free choice variables with one IVAR each
  CHECK(m.text.find("IVAR\n") != std::string::npos);
  CHECK(m.text.find("nd_0 : boolean;") != std::string::npos);
  CHECK(m.text.find("nd_1 : boolean;") != std::string::npos);

  // the second branch arm fires only when the first one does not
  size_t define_at = m.text.find("DEFINE\n");
  REQUIRE(define_at != std::string::npos);
  bool negated_sibling = false;
  std::istringstream in(m.text.substr(define_at));
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("  t_", 0) == 0 && line.find("& (!") != std::string::npos)
      negated_sibling = true;
  }
  CHECK(negated_sibling);

  // a narrowed input domain becomes a TRANS constraint on its choice
  VerificationProblem narrowed = p;
  for (Variable& v : narrowed.net.variables)
    if (v.name == Symbol::intern("a")) v.domain.values = {{1}};
  EmittedModel mn = emit_smv(narrowed);
  CHECK(mn.text.find("TRANS ((nd_0 = TRUE));") != std::string::npos);
}

TEST_CASE("smv turns sequential assignments into parallel arms") {
  CfaNetwork net;
  net.entry_name = Symbol::intern("Hand");
  Variable x;
  x.name = Symbol::intern("x");
  x.type.base = Scalar::Int;
  x.kind = VarKind::Local;
  x.domain = full_domain(Scalar::Int);
  Variable y = x;
  y.name = Symbol::intern("y");
  net.variables = {x, y};

  Automaton& a = net.main;
  a.name = net.entry_name;
  a.initial = a.add_location(LocRole::Initial);
  a.cycle_start = a.add_location(LocRole::CycleStart);
  a.end_of_cycle = a.add_location(LocRole::EndOfCycle);
  int body = a.add_location(LocRole::Plain);

  auto var = [](const Variable& v) {
    return Expr::var_ref(v.name, v.type.base);
  };
  Transition t0;
  t0.source = a.initial;
  t0.target = a.cycle_start;
  a.transitions.push_back(t0);
  Transition t1;
  t1.source = a.cycle_start;
  t1.target = body;
  Assignment inc;
  inc.var = x.name;
  inc.value = Expr::binary(BinOp::Add, var(x),
                           Expr::literal(Scalar::Int, 1), Scalar::Int);
  Assignment dbl;
  dbl.var = y.name;
  dbl.value = Expr::binary(BinOp::Mul, var(x),
                           Expr::literal(Scalar::Int, 2), Scalar::Int);
  t1.assigns = {inc, dbl};
  a.transitions.push_back(t1);
  Transition t2;
  t2.source = body;
  t2.target = a.end_of_cycle;
  a.transitions.push_back(t2);
  Transition t3;
  t3.source = a.end_of_cycle;
  t3.target = a.cycle_start;
  a.transitions.push_back(t3);

  VerificationProblem p;
  p.net = net;
  p.property.at = Property::At::EndOfCycle;
  p.property.expr = Expr::binary(BinOp::Le, var(x),
                                 Expr::literal(Scalar::Int, 100), Scalar::Bool);
  p.property.label = "hand";

  EmittedModel m = emit_smv(p);
  // y's arm reads x's new value: the earlier write is substituted in
  CHECK(m.text.find("t_1 : ((x + 0sh16_0001) * 0sh16_0002);") !=
        std::string::npos);
  CHECK(m.text.find("t_1 : (x + 0sh16_0001);") != std::string::npos);
}

// --- c emission -----------------------------------------------------------------

TEST_CASE("c emission matches its golden file and is deterministic") {
  VerificationProblem p = first_problem(kConveyorProgram);
  EmittedModel m1 = emit_c(p);
  EmittedModel m2 = emit_c(p);
  CHECK(m1.text == m2.text);
  CHECK(m1.format == "c");
  CHECK(m1.array_lo.at(em(m1, "buf")) == 1);

  // a mid-body RETURN leaves the scan function, not the program
  CHECK(m1.text.find("return;") != std::string::npos);
  CHECK(m1.text.find("static void scan_cycle(void)") != std::string::npos);
  check_golden("conveyor.c", m1.text);
}

TEST_CASE("c emission is structured: loops stay loops and no goto appears") {
  for (const AgreementProgram& prog : kAgreementPrograms) {
    DYNAMIC_SECTION(prog.name) {
      VerificationProblem p = first_problem(prog.source);
      EmittedModel m = emit_c(p);
      CHECK(m.text.find("goto") == std::string::npos);
      CHECK(m.text.find("while (1) {") != std::string::npos);
    }
  }
  SECTION("loop bodies are emitted once, not unrolled") {
    VerificationProblem p = first_problem(kConveyorProgram);
    EmittedModel m = emit_c(p);
    CHECK(m.text.find("goto") == std::string::npos);
    // one FOR body, one WHILE body, each a single instance
    std::string n = em(m, "n");
    std::string total = em(m, "total");
    std::string buf = em(m, "buf");
    CHECK(count_occurrences(m.text, n + " + ") == 1);
    CHECK(count_occurrences(
              m.text, total + " = ((stv_int32)(" + total + " + " + buf) == 1);
    // scan loop, FOR, WHILE: at least three structured loops
    CHECK(count_occurrences(m.text, "while (1) {") >= 3);
  }
}

TEST_CASE("compiled c models agree with engine replay") {
  if (!find_executable("gcc")) SKIP("gcc is not installed");

  fs::path dir = fs::temp_directory_path() /
                 ("stverif-oracle-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::ofstream(dir / "shim.c") << kNondetShim;

  const int kCycles = 6;
  const int kScripts = 6;
  int programs_run = 0;
  for (size_t pi = 0; pi < std::size(kAgreementPrograms); ++pi) {
    const AgreementProgram& prog = kAgreementPrograms[pi];
    DYNAMIC_SECTION(prog.name) {
      VerificationProblem p = first_problem(prog.source);
      EmittedModel m = emit_c(p);
      fs::path model_c = dir / ("model" + std::to_string(pi) + ".c");
      fs::path bin = dir / ("model" + std::to_string(pi) + ".bin");
      std::ofstream(model_c) << m.text;
      int cc = run_command("gcc -std=c11 -O1 -o " + bin.string() + " " +
                           model_c.string() + " " + (dir / "shim.c").string() +
                           " 2> " + (dir / "cc.log").string());
      INFO(slurp(dir / "cc.log"));
      REQUIRE(cc == 0);

      std::vector<Scalar> input_types;
      for (const std::string& name : m.input_names) {
        const Variable* v = p.net.find_variable(Symbol::intern(name));
        REQUIRE(v != nullptr);
        input_types.push_back(v->type.base);
      }
      REQUIRE_FALSE(input_types.empty());

      for (int s = 0; s < kScripts; ++s) {
        std::mt19937 rng(1000u * static_cast<unsigned>(pi) +
                         static_cast<unsigned>(s));
        std::vector<CycleInputs> ins;
        std::string script;
        for (int c = 0; c < kCycles; ++c) {
          CycleInputs ci;
          for (size_t k = 0; k < input_types.size(); ++k) {
            int64_t v = draw_value(rng, input_types[k]);
            ci.emplace_back(Symbol::intern(m.input_names[k]),
                            static_cast<int32_t>(v));
            script += std::to_string(v) + "\n";
          }
          ins.push_back(std::move(ci));
        }
        fs::path script_file = dir / ("s" + std::to_string(s) + ".txt");
        fs::path out_file = dir / ("o" + std::to_string(s) + ".txt");
        std::ofstream(script_file) << script;

        Trace replayed = replay(p, ins);
        REQUIRE_FALSE(replayed.violation.fault);
        bool violated = replayed.violation.cycle >= 1;

        int rc = run_command("STVERIF_SCRIPT=" + script_file.string() + " " +
                             bin.string() + " > " + out_file.string());
        INFO("script:\n" << script);
        if (violated) {
          CHECK(rc == 7);
          std::string out = slurp(out_file);
          size_t at = out.find("ASSERTFAIL pos=");
          REQUIRE(at != std::string::npos);
          unsigned long pos = std::stoul(out.substr(at + 15));
          CHECK(pos == static_cast<unsigned long>(replayed.violation.cycle) *
                           input_types.size());
        } else {
          CHECK(rc == 0);
        }
      }
      ++programs_run;
    }
  }
  fs::remove_all(dir);
}

// --- external process execution ---------------------------------------------------

TEST_CASE("external runs capture output, exit codes, and timeouts") {
  EmittedModel m;
  m.format = "smv";
  m.text = "hello\nbackend\n";

  SECTION("a cooperative tool sees the model file and is captured") {
    if (!find_executable("cat")) SKIP("cat is not installed");
    ToolConfig cfg;
    cfg.path = "cat";
    cfg.timeout_s = 20.0;
    ToolRun r = run_external(cfg, m);
    CHECK(r.exit_code == 0);
    CHECK_FALSE(r.timed_out);
    CHECK(r.output == m.text);
    REQUIRE(r.command.size() == 2);
  }
  SECTION("the model file can be kept for inspection") {
    if (!find_executable("cat")) SKIP("cat is not installed");
    ToolConfig cfg;
    cfg.path = "cat";
    fs::path keep = fs::temp_directory_path() /
                    ("stverif-keep-" + std::to_string(::getpid()) + ".smv");
    ToolRun r = run_external(cfg, m, keep.string());
    CHECK(r.output == m.text);
    REQUIRE(fs::exists(keep));
    CHECK(slurp(keep) == m.text);
    fs::remove(keep);
  }
  SECTION("a missing executable is an error naming the path") {
    ToolConfig cfg;
    cfg.path = "/no/such/dir/checker-xyz";
    try {
      run_external(cfg, m);
      FAIL("expected a lookup error");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find("/no/such/dir/checker-xyz") !=
            std::string::npos);
    }
    cfg.path = "definitely-not-an-installed-tool-qq";
    CHECK_THROWS_AS(run_external(cfg, m), std::runtime_error);
  }
  SECTION("a hung tool is killed at the deadline and flagged") {
    if (!find_executable("sh")) SKIP("sh is not installed");
    ToolConfig cfg;
    cfg.path = "sh";
    cfg.extra_args = {"-c", "sleep 30", "sh"};
    cfg.timeout_s = 0.3;
    auto t0 = std::chrono::steady_clock::now();
    ToolRun r = run_external(cfg, m);
    double waited = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    CHECK(r.timed_out);
    CHECK(waited < 5.0);
    Verdict v = parse_tool_output(r, m);
    CHECK(v.kind == VerdictKind::Unknown);
    CHECK(v.note.find("timed out") != std::string::npos);
  }
  SECTION("a nonzero exit code is reported as-is") {
    if (!find_executable("false")) SKIP("false is not installed");
    ToolConfig cfg;
    cfg.path = "false";
    ToolRun r = run_external(cfg, m);
    CHECK(r.exit_code == 1);
    CHECK_FALSE(r.timed_out);
  }
}

// --- checker output parsing --------------------------------------------------------

TEST_CASE("invariant checker output maps to verdicts and traces") {
  VerificationProblem p = first_problem(kCounterProgram);
  EmittedModel m = emit_smv(p);
  const Automaton& a = p.net.main;
  std::string cyc = loc_lit(a, a.cycle_start);
  std::string eoc = loc_lit(a, a.end_of_cycle);
  std::string anchor = loc_lit(a, anchor_loc_id(p));

  SECTION("a proved invariant is a satisfied verdict") {
    ToolRun r;
    r.exit_code = 0;
    r.output = "-- invariant ((loc = " + anchor + ") -> (!q))  is true\n";
    Verdict v = parse_tool_output(r, m);
    CHECK(v.kind == VerdictKind::Satisfied);
  }

  SECTION("a counterexample becomes a per-cycle trace with source names") {
    std::string q = em(m, "q"), c = em(m, "c");
    std::string va = em(m, "a"), vb = em(m, "b");
    std::ostringstream out;
    out << "-- invariant ((loc = " << anchor << ") -> (!" << q
        << "))  is false\n";
    out << "-- as demonstrated by the following execution sequence\n";
    out << "Trace Type: Counterexample\n";
    out << "-> State: 1.1 <-\n";
    out << "  loc = " << loc_lit(a, a.initial) << "\n";
    out << "  " << va << " = FALSE\n  " << vb << " = FALSE\n";
    out << "  " << q << " = FALSE\n  " << c << " = 0sd16_0\n";
    out << "-> State: 1.2 <-\n  loc = " << cyc << "\n";
    out << "-> Input: 1.3 <-\n  nd_0 = TRUE\n  nd_1 = FALSE\n";
    out << "-> State: 1.3 <-\n  loc = L3\n  " << va << " = TRUE\n";
    out << "-> State: 1.4 <-\n  loc = " << eoc << "\n  " << c
        << " = 0sd16_1\n";
    out << "-> State: 1.5 <-\n  loc = " << cyc << "\n";
    out << "-> State: 1.6 <-\n  loc = " << anchor << "\n  " << c
        << " = 0sh16_0003\n  " << q << " = TRUE\n";

    ToolRun r;
    r.exit_code = 0;
    r.output = out.str();
    Verdict v = parse_tool_output(r, m);
    REQUIRE(v.kind == VerdictKind::Violated);
    REQUIRE(v.trace.has_value());
    REQUIRE(v.trace->cycles.size() == 2);

    const CycleRecord& first = v.trace->cycles[0];
    REQUIRE(first.inputs.size() == 2);
    CHECK(first.inputs[0] ==
          std::make_pair(Symbol::intern("a"), int32_t{1}));
    CHECK(first.inputs[1] ==
          std::make_pair(Symbol::intern("b"), int32_t{0}));
    bool saw_c1 = false;
    for (const auto& [name, value] : first.end_values)
      if (name == "c") {
        saw_c1 = true;
        CHECK(value == 1);
      }
    CHECK(saw_c1);

    const Violation& viol = v.trace->violation;
    CHECK(viol.cycle == 2);
    CHECK(viol.anchor_id == p.property.anchor_id);
    CHECK(viol.location_id == anchor_loc_id(p));
    CHECK_FALSE(viol.fault);
    for (const auto& [name, value] : v.trace->cycles[1].end_values)
      if (name == "q") CHECK(value == 1);
  }

  SECTION("unrecognizable output is unknown with the raw text attached") {
    ToolRun r;
    r.exit_code = 2;
    r.output = "catastrophic parse error near line 3\n";
    Verdict v = parse_tool_output(r, m);
    CHECK(v.kind == VerdictKind::Unknown);
    CHECK(v.note.find("catastrophic parse error") != std::string::npos);
  }
}

TEST_CASE("bounded checker output maps to verdicts, traces, and faults") {
  VerificationProblem p = first_problem(kConveyorProgram);
  EmittedModel m = emit_c(p);
  std::string buf = em(m, "buf"), total = em(m, "total"), go = em(m, "go");
  std::string n = em(m, "n");

  SECTION("a clean pass is a bound-limited verdict, not a proof") {
    ToolRun r;
    r.exit_code = 0;
    r.output = "unwinding loop scan_cycle.0\n** 0 of 5 failed\n"
               "VERIFICATION SUCCESSFUL\n";
    Verdict v = parse_tool_output(r, m);
    CHECK(v.kind == VerdictKind::BoundReached);
  }

  SECTION("a failed assertion becomes a violation with unmapped names") {
    std::ostringstream out;
    out << "** Results:\n";
    out << "[main.assertion.1] line 40 stv: end-of-cycle loc="
        << p.net.main.end_of_cycle << " expr=(total < 100000): FAILURE\n\n";
    out << "Trace for main.assertion.1:\n\n";
    out << "State 10 file model.c line 8 function main thread 0\n";
    out << "  " << total << "=0 (00000000000000000000000000000000)\n";
    out << "State 14 file model.c line 20 function scan_cycle thread 0\n";
    out << "  " << n << "=30000 (0111010100110000)\n";
    out << "  " << go << "=1 (1)\n";
    out << "  " << buf << "[0]=30001 (0111010100110001)\n";
    out << "  " << total << "=90006 (00000000000000010101111110010110)\n";
    out << "  stv_cycle=1 (00000000000000000000000000000001)\n";
    out << "  " << n << "=30000 (0111010100110000)\n";
    out << "  " << total << "=180012 (00000000000000101011111100101100)\n";
    out << "VERIFICATION FAILED\n";

    ToolRun r;
    r.exit_code = 10;
    r.output = out.str();
    Verdict v = parse_tool_output(r, m);
    REQUIRE(v.kind == VerdictKind::Violated);
    REQUIRE(v.trace.has_value());
    REQUIRE(v.trace->cycles.size() == 2);

    // the zero-based element index is shifted back to the source range
    bool saw_elem = false;
    for (const auto& [name, value] : v.trace->cycles[0].end_values)
      if (name == "buf[1]") {
        saw_elem = true;
        CHECK(value == 30001);
      }
    CHECK(saw_elem);
    CHECK(v.trace->cycles[0].inputs[0] ==
          std::make_pair(Symbol::intern("n"), int32_t{30000}));

    const Violation& viol = v.trace->violation;
    CHECK(viol.cycle == 2);
    CHECK(viol.anchor_id == -1);
    CHECK(viol.location_id == p.net.main.end_of_cycle);
    CHECK(viol.detail == "(total < 100000)");
    CHECK_FALSE(viol.fault);
  }

  SECTION("a runtime fault reported by the checker is a fault verdict") {
    ToolRun r;
    r.exit_code = 10;
    r.output =
        "** Results:\n"
        "[scan_cycle.division-by-zero.1] line 22 division by zero in x / y: "
        "FAILURE\n"
        "VERIFICATION FAILED\n";
    Verdict v = parse_tool_output(r, m);
    REQUIRE(v.kind == VerdictKind::Fault);
    REQUIRE(v.trace.has_value());
    CHECK(v.trace->violation.fault);
    CHECK(v.trace->violation.detail.find("division by zero") !=
          std::string::npos);
  }

  SECTION("garbage output is unknown with the raw text attached") {
    ToolRun r;
    r.exit_code = 6;
    r.output = "PARSING ERROR near token 'while'\n";
    Verdict v = parse_tool_output(r, m);
    CHECK(v.kind == VerdictKind::Unknown);
    CHECK(v.note.find("PARSING ERROR") != std::string::npos);
  }
}

// --- optional live checker agreement ------------------------------------------------

TEST_CASE("installed checkers agree with the engine") {
  auto nusmv = find_executable("NuSMV");
  auto cbmc = find_executable("cbmc");
  if (!nusmv && !cbmc)
    SKIP("no external checker installed; engine-only environment");

  VerificationProblem violated = first_problem(kCounterProgram);
  violated.job.bound = 6;
  VerificationProblem safe = first_problem(R"(
PROGRAM Main
VAR_INPUT a : BOOL; END_VAR
VAR_OUTPUT q : BOOL; END_VAR
  q := a AND NOT a;
  //#ASSERT NOT q
END_PROGRAM
)");
  safe.job.bound = 4;

  if (nusmv) {
    Verdict bad = run_nusmv(violated);
    CHECK(bad.kind == VerdictKind::Violated);
    REQUIRE(bad.trace.has_value());
    CHECK(bad.trace->violation.cycle >= 3);
    Verdict good = run_nusmv(safe);
    CHECK(good.kind == VerdictKind::Satisfied);
  }
  if (cbmc) {
    Verdict bad = run_cbmc(violated);
    CHECK(bad.kind == VerdictKind::Violated);
    REQUIRE(bad.trace.has_value());
    CHECK(bad.trace->violation.cycle >= 3);
    Verdict good = run_cbmc(safe);
    CHECK(good.kind == VerdictKind::BoundReached);
  }
}
