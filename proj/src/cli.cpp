#include "printsig/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "printsig/audio.hpp"
#include "printsig/corpus.hpp"
#include "printsig/cube.hpp"
#include "printsig/dsp.hpp"
#include "printsig/error.hpp"
#include "printsig/fingerprint.hpp"
#include "printsig/gcode.hpp"
#include "printsig/signing.hpp"
#include "printsig/stream.hpp"
#include "printsig/synth.hpp"
#include "printsig/tamper.hpp"
#include "printsig/verifier.hpp"

namespace printsig::cli {

namespace {

namespace fs = std::filesystem;

std::string read_text(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::string &path, std::string_view data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error("write failed: " + path);
}

void write_csv_matrix(const std::string &path, const Eigen::MatrixXd &m) {
  std::ostringstream s;
  s.precision(17);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) s << (c ? "," : "") << m(r, c);
    s << '\n';
  }
  write_bytes(path, s.str());
}

SynthConfig synth_config(const std::string &config_path, std::optional<double> snr, std::uint64_t seed) {
  SynthConfig config;
  if (!config_path.empty()) config = parse_synth_config(read_text(config_path));
  if (snr) config.noise_snr_db = snr;
  config.rng_seed = seed;
  return config;
}

struct Options {
  std::string input;
  std::string out;
  std::string wav;
  std::string key;
  std::string pub;
  std::string trace;
  std::string manifest;
  std::string config;
  std::string csv_prefix;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::optional<double> snr;
  double chunk_s = 0.0;
  std::size_t layers = 40;
  IndicatorConfig indicator;
};

int cmd_keygen(const Options &o, std::ostream &out) {
  KeyPair kp = keygen(o.seed_given ? std::optional<std::uint64_t>(o.seed) : std::nullopt);
  fs::create_directories(o.out);
  const std::string secret = (fs::path(o.out) / "printsig.key").string();
  const std::string pub = (fs::path(o.out) / "printsig.pub").string();
  write_bytes(secret, secret_key_text(kp.secret));
  fs::permissions(secret, fs::perms::owner_read | fs::perms::owner_write, fs::perm_options::replace);
  write_bytes(pub, public_key_text(kp.public_key));
  out << "wrote " << secret << " and " << pub << '\n';
  return kExitOk;
}

int cmd_synth(const Options &o, std::ostream &out) {
  GCodeProgram program = parse_gcode(read_text(o.input));
  AudioSignal audio = render(program, synth_config(o.config, o.snr, o.seed));
  write_wav16(o.out, audio);
  out << "wrote " << o.out << " (" << audio.duration() << " s)\n";
  return kExitOk;
}

int cmd_fingerprint(const Options &o, std::ostream &out) {
  FingerprintReport report = generate_fingerprint_report(load_audio(o.input));
  auto payload = encode_payload(report.fingerprint);
  write_bytes(o.out, std::string_view(reinterpret_cast<const char *>(payload.data()), payload.size()));
  if (!o.csv_prefix.empty()) {
    write_csv_matrix(o.csv_prefix + "_components.csv", report.fingerprint.components);
    write_csv_matrix(o.csv_prefix + "_mfts.csv", report.fingerprint.mfts);
  }
  out << "frames: " << report.frames << '\n';
  out << "explained variance:";
  for (Eigen::Index i = 0; i < report.explained_variance.size(); ++i) out << ' ' << report.explained_variance(i);
  if (report.cumulative_variance.size() > 0) {
    out << "\ncumulative:";
    for (Eigen::Index i = 0; i < report.cumulative_variance.size() && i < 10; ++i) {
      out << ' ' << report.cumulative_variance(i);
    }
  }
  out << "\nwrote " << o.out << " (" << payload.size() << " bytes)\n";
  return kExitOk;
}

int cmd_sign(const Options &o, std::ostream &out) {
  std::string body = read_text(o.input);
  Fingerprint fp = generate_fingerprint(load_audio(o.wav));
  SecretKey key = parse_secret_key(read_text(o.key));
  write_bytes(o.out, sign_gcode(body, fp, key));
  out << "wrote " << o.out << " (" << fp.frames() << " frames)\n";
  return kExitOk;
}

int cmd_verify(const Options &o, std::ostream &out) {
  VerifiedGCode verified = verify_extract(read_text(o.input), parse_public_key(read_text(o.pub)));
  AudioSignal audio = load_audio(o.wav);
  SimilarityTrace trace;
  Verdict verdict;
  if (o.chunk_s > 0.0) {
    StreamSession session(verified.fingerprint, o.indicator);
    const auto chunk = static_cast<std::size_t>(std::max(1.0, std::round(o.chunk_s * audio.sample_rate)));
    for (std::size_t start = 0; start < audio.samples.size(); start += chunk) {
      std::size_t n = std::min(chunk, audio.samples.size() - start);
      session.feed({start, audio.sample_rate, std::span<const double>(audio.samples).subspan(start, n)});
    }
    StreamResult result = session.finish();
    trace = std::move(result.trace);
    verdict = std::move(result.verdict);
  } else {
    trace = compare(audio, verified.fingerprint, {}, o.indicator.smooth_span);
    verdict = detect(trace, o.indicator);
  }
  if (!o.trace.empty()) {
    std::ofstream csv(o.trace);
    if (!csv) throw Error("cannot write " + o.trace);
    write_trace_csv(csv, trace);
  }
  out << verdict_json(verdict) << '\n';
  return verdict.flagged ? kExitFlagged : kExitOk;
}

int cmd_tamper(const Options &o, std::ostream &out) {
  GCodeProgram program = parse_gcode(read_text(o.input));
  std::vector<TamperSpec> specs = parse_manifest(read_text(o.manifest));
  write_bytes(o.out, serialize(apply_all(program, specs)));
  out << "applied " << specs.size() << " modification(s), wrote " << o.out << '\n';
  return kExitOk;
}

int cmd_corpus(const Options &o, std::ostream &out) {
  std::string text = read_text(o.input);
  GCodeProgram program = parse_gcode(text);
  fs::create_directories(o.out);
  const double snr = o.snr.value_or(20.0);
  auto path = [&](const std::string &name) { return (fs::path(o.out) / name).string(); };

  // The master recording uses the base seed; every case renders with its own.
  write_bytes(path("master.gcode"), text);
  write_wav16(path("master.wav"), render(program, synth_config(o.config, snr, o.seed)));
  std::uint64_t seed = o.seed;
  for (const CorpusCase &c : tamper_families(program)) {
    ++seed;
    GCodeProgram variant = apply_all(program, c.specs);
    std::string manifest;
    for (const TamperSpec &s : c.specs) manifest += to_manifest_line(s) + "\n";
    write_bytes(path(c.name + ".manifest"), manifest);
    write_bytes(path(c.name + ".gcode"), serialize(variant));
    write_wav16(path(c.name + ".wav"), render(variant, synth_config(o.config, snr, seed)));
    out << c.name << '\n';
  }
  // Benign print with a 2 s burst of noise at the signal's own power.
  AudioSignal noisy = render(program, synth_config(o.config, snr, ++seed));
  double mid = noisy.duration() / 2.0;
  write_wav16(path("noise_burst.wav"), mix_noise(noisy, 0.0, ++seed, {{mid - 1.0, mid + 1.0}}));
  out << "noise_burst\n";
  return kExitOk;
}

int cmd_cube(const Options &o, std::ostream &out) {
  CubeOptions options;
  options.layers = o.layers;
  write_bytes(o.out, make_cube_gcode(options).text);
  out << "wrote " << o.out << '\n';
  return kExitOk;
}

int cmd_spectrogram(const Options &o, std::ostream &out) {
  Spectrogram spec = front_end(load_audio(o.input));
  std::ofstream csv(o.out);
  if (!csv) throw Error("cannot write " + o.out);
  write_spectrogram_csv(csv, spec);
  out << "wrote " << o.out << " (" << spec.frames() << " frames)\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Acoustic fingerprinting and verification of 3D prints"};
  app.name(args.empty() ? "printsig" : fs::path(args[0]).filename().string());
  app.require_subcommand(1);
  Options o;

  auto seed_option = [&o](CLI::App *cmd) {
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&o](std::uint64_t v) { o.seed = v, o.seed_given = true; }, "RNG seed");
  };

  CLI::App *keygen_cmd = app.add_subcommand("keygen", "Create a signing keypair");
  keygen_cmd->add_option("--out", o.out, "Output directory")->required();
  seed_option(keygen_cmd);

  CLI::App *synth_cmd = app.add_subcommand("synth", "Render G-code to a WAV recording");
  synth_cmd->add_option("gcode", o.input)->required()->check(CLI::ExistingFile);
  synth_cmd->add_option("--out", o.out, "Output WAV")->required();
  seed_option(synth_cmd);
  synth_cmd->add_option("--snr", o.snr, "Add white noise at this SNR (dB)");
  synth_cmd->add_option("--config", o.config, "key=value synthesizer settings")->check(CLI::ExistingFile);

  CLI::App *fp_cmd = app.add_subcommand("fingerprint", "Compute a fingerprint from a recording");
  fp_cmd->add_option("wav", o.input)->required()->check(CLI::ExistingFile);
  fp_cmd->add_option("--out", o.out, "Binary fingerprint payload")->required();
  fp_cmd->add_option("--csv", o.csv_prefix, "Also write <prefix>_components.csv and <prefix>_mfts.csv");

  CLI::App *sign_cmd = app.add_subcommand("sign", "Embed a signed fingerprint in G-code");
  sign_cmd->add_option("gcode", o.input)->required()->check(CLI::ExistingFile);
  sign_cmd->add_option("--wav", o.wav, "Master recording")->required()->check(CLI::ExistingFile);
  sign_cmd->add_option("--key", o.key, "Secret key file")->required()->check(CLI::ExistingFile);
  sign_cmd->add_option("--out", o.out, "Signed G-code")->required();

  CLI::App *verify_cmd = app.add_subcommand("verify", "Check a recording against signed G-code");
  verify_cmd->add_option("signed", o.input)->required()->check(CLI::ExistingFile);
  verify_cmd->add_option("--wav", o.wav, "Recording of the print")->required()->check(CLI::ExistingFile);
  verify_cmd->add_option("--pub", o.pub, "Public key file")->required()->check(CLI::ExistingFile);
  verify_cmd->add_option("--trace", o.trace, "Write the similarity trace as CSV");
  verify_cmd->add_option("--window-s", o.indicator.window_s, "Indicator window (s)")->capture_default_str();
  verify_cmd->add_option("--drop", o.indicator.drop, "Required fall in window means")->capture_default_str();
  verify_cmd->add_option("--consecutive", o.indicator.consecutive, "Windows in a falling run")
      ->capture_default_str();
  verify_cmd->add_option("--stream-chunk-s", o.chunk_s, "Verify as a stream of chunks of this length (s)");

  CLI::App *tamper_cmd = app.add_subcommand("tamper", "Apply a modification manifest");
  tamper_cmd->add_option("gcode", o.input)->required()->check(CLI::ExistingFile);
  tamper_cmd->add_option("--spec", o.manifest, "Manifest file")->required()->check(CLI::ExistingFile);
  tamper_cmd->add_option("--out", o.out, "Modified G-code")->required();

  CLI::App *corpus_cmd = app.add_subcommand("corpus", "Render the tamper families of a print");
  corpus_cmd->add_option("--gcode", o.input, "Source G-code")->required()->check(CLI::ExistingFile);
  corpus_cmd->add_option("--out", o.out, "Output directory")->required();
  seed_option(corpus_cmd);
  corpus_cmd->add_option("--snr", o.snr, "Recording SNR in dB (default 20)");
  corpus_cmd->add_option("--config", o.config, "key=value synthesizer settings")->check(CLI::ExistingFile);

  CLI::App *cube_cmd = app.add_subcommand("cube", "Write the test cube G-code");
  cube_cmd->add_option("--out", o.out, "Output G-code")->required();
  cube_cmd->add_option("--layers", o.layers, "Layer count")->capture_default_str()->check(CLI::PositiveNumber);

  CLI::App *spec_cmd = app.add_subcommand("spectrogram", "Dump the analysis spectrogram as CSV");
  spec_cmd->add_option("wav", o.input)->required()->check(CLI::ExistingFile);
  spec_cmd->add_option("--out", o.out, "Output CSV")->required();

  std::vector<const char *> argv;
  std::vector<std::string> storage = args.empty() ? std::vector<std::string>{"printsig"} : args;
  for (const std::string &a : storage) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (keygen_cmd->parsed()) return cmd_keygen(o, out);
    if (synth_cmd->parsed()) return cmd_synth(o, out);
    if (fp_cmd->parsed()) return cmd_fingerprint(o, out);
    if (sign_cmd->parsed()) return cmd_sign(o, out);
    if (verify_cmd->parsed()) return cmd_verify(o, out);
    if (tamper_cmd->parsed()) return cmd_tamper(o, out);
    if (corpus_cmd->parsed()) return cmd_corpus(o, out);
    if (cube_cmd->parsed()) return cmd_cube(o, out);
    if (spec_cmd->parsed()) return cmd_spectrogram(o, out);
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace printsig::cli
