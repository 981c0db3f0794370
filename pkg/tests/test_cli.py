"""Test module for the sparsestream command line."""

import csv
import json
from pathlib import Path

import pytest

from sparsestream import __version__
from sparsestream.cli import (
    MANIFEST_NAME,
    Subcommand,
    build_parser,
    load_manifest,
    main,
)
from sparsestream.cli.commands import (
    BUDGET_NAME,
    CONVERGENCE_NAME,
    DESIGN_NAME,
    NETWORK_NAME,
    PROFILE_NAME,
    SIMULATION_NAME,
    SWEEP_BUFFER_NAME,
    SWEEP_ENGINE_NAME,
)
from sparsestream.cli.report import NETWORK_ROW, REPORT_NAME
from sparsestream.dse import load_design
from sparsestream.netspec import load_network
from sparsestream.trace import load_trace

FAST_SCHEDULE = {
    "initial_temperature": 0.5,
    "cooling_rate": 0.5,
    "iterations_per_temperature": 10,
    "min_temperature": 0.01,
}
DSE_OUTPUTS = (
    DESIGN_NAME,
    CONVERGENCE_NAME,
    SIMULATION_NAME,
    REPORT_NAME,
    NETWORK_NAME,
    BUDGET_NAME,
)


@pytest.fixture
def toy_files(data_dir: Path, tmp_path: Path) -> dict[str, str]:
    """Paths of the bundled toy inputs and a quick annealing schedule."""
    schedule = tmp_path / "sa.json"
    schedule.write_text(json.dumps(FAST_SCHEDULE), encoding="utf-8")
    return {
        "network": str(data_dir / "networks" / "toy.json"),
        "budget": str(data_dir / "budgets" / "toy.json"),
        "sa": str(schedule),
    }


@pytest.fixture
def bad_trace(tmp_path: Path) -> Path:
    """A file that is not a trace."""
    path = tmp_path / "bad.sstr"
    path.write_bytes(b"junk")
    return path


def _dse(files: dict[str, str], out: Path, *extra: str) -> int:
    return main(
        [
            "dse",
            "--network",
            files["network"],
            "--budget",
            files["budget"],
            "--sa-config",
            files["sa"],
            "--length",
            "256",
            "--out",
            str(out),
            *extra,
        ]
    )


def _csv_rows(path: Path) -> list[dict[str, str]]:
    with path.open(newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))


def _minimal_args(subcommand: Subcommand) -> list[str]:
    synthetic = ["--sparsity-model", "iid-bernoulli:0.5", "--out", "o"]
    return {
        Subcommand.PROFILE: ["--traces", "a.sstr", "--out", "o"],
        Subcommand.SWEEP_ENGINE: ["--out", "o"],
        Subcommand.SWEEP_BUFFER: ["--network", "n", "--n-i", "2", "--k", "1"]
        + synthetic,
        Subcommand.GENERATE: ["--network", "n"] + synthetic,
        Subcommand.MODEL: ["--network", "n", "--design", "d"] + synthetic,
        Subcommand.SIMULATE: ["--network", "n", "--design", "d"] + synthetic,
        Subcommand.DSE: ["--network", "n", "--budget", "b"] + synthetic,
        Subcommand.REPORT: ["run"],
    }[subcommand]


@pytest.mark.unit
class TestParser:
    """Argument parsing."""

    def test_subcommands(self) -> None:
        """Every subcommand is registered."""
        parser = build_parser()
        for subcommand in Subcommand:
            args = parser.parse_args(
                [str(subcommand), *_minimal_args(subcommand)]
            )
            assert args.subcommand == str(subcommand)
            assert callable(args.func)

    def test_sparsity_sources_exclusive(self) -> None:
        """Traces and a synthetic model cannot be combined."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(
                [
                    "dse",
                    "--network",
                    "n.json",
                    "--budget",
                    "b.json",
                    "--traces",
                    "a.sstr",
                    "--sparsity-model",
                    "iid-bernoulli:0.5",
                    "--out",
                    "run",
                ]
            )

    def test_sparsity_source_required(self) -> None:
        """dse needs traces or a sparsity model."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(
                ["dse", "--network", "n.json", "--budget", "b.json", "--out", "run"]
            )

    def test_version(self, capsys: pytest.CaptureFixture[str]) -> None:
        """--version prints the package version."""
        with pytest.raises(SystemExit):
            main(["--version"])
        assert __version__ in capsys.readouterr().out


@pytest.mark.integration
class TestCommands:
    """Each subcommand end to end on the toy network."""

    def test_generate_and_profile(
        self, toy_files: dict[str, str], tmp_path: Path
    ) -> None:
        """Generated traces can be profiled."""
        out = tmp_path / "gen"
        status = main(
            [
                "generate",
                "--network",
                toy_files["network"],
                "--sparsity-model",
                "iid-bernoulli:0.5",
                "--max-streams",
                "4",
                "--length",
                "128",
                "--out",
                str(out),
            ]
        )
        assert status == 0
        names = ["conv1", "conv2", "conv3"]
        for name in names:
            trace = load_trace(out / "traces" / f"{name}.sstr")
            assert trace.num_streams == 4
            assert trace.length == 128
        manifest = load_manifest(out)
        assert manifest.subcommand is Subcommand.GENERATE
        assert manifest.outputs == [f"traces/{name}.sstr" for name in names]

        profile = tmp_path / "profile"
        paths = [str(out / "traces" / f"{name}.sstr") for name in names]
        assert main(["profile", "--traces", *paths, "--out", str(profile)]) == 0
        rows = _csv_rows(profile / PROFILE_NAME)
        assert len(rows) == 3 * 4
        assert {row["layer"] for row in rows} == set(names)
        assert all(0.3 < float(row["mean"]) < 0.7 for row in rows)
        assert all(row["rho_128"] for row in rows)

    def test_profile_bad_file(
        self, tmp_path: Path, bad_trace: Path, capsys: pytest.CaptureFixture[str]
    ) -> None:
        """Unreadable traces are reported and give exit status 1."""
        bad = bad_trace
        out = tmp_path / "profile"
        assert main(["profile", "--traces", str(bad), "--out", str(out)]) == 1
        assert "bad.sstr" in capsys.readouterr().err
        assert _csv_rows(out / PROFILE_NAME) == []

    def test_profile_undecodable_csv(
        self, tmp_path: Path, capsys: pytest.CaptureFixture[str]
    ) -> None:
        """A non-UTF-8 CSV is skipped while the readable traces are profiled."""
        good = tmp_path / "good.csv"
        good.write_text("stream,t,mask\n0,0,101\n0,1,011\n", encoding="utf-8")
        bad = tmp_path / "bad.csv"
        bad.write_bytes(b"\xff\xfe\x00junk\n")
        out = tmp_path / "profile"
        status = main(
            ["profile", "--traces", str(good), str(bad), "--out", str(out)]
        )
        assert status == 1
        assert "bad.csv" in capsys.readouterr().err
        rows = _csv_rows(out / PROFILE_NAME)
        assert [row["layer"] for row in rows] == ["good"]

    def test_sweep_engine(self, tmp_path: Path) -> None:
        """The engine sweep covers every requested k and sparsity."""
        out = tmp_path / "engine"
        status = main(
            [
                "sweep-engine",
                "--k",
                "1",
                "9",
                "--step",
                "0.25",
                "--length",
                "500",
                "--out",
                str(out),
            ]
        )
        assert status == 0
        rows = _csv_rows(out / SWEEP_ENGINE_NAME)
        assert len(rows) == 2 * 5
        assert load_manifest(out).options["k"] == [1, 9]

    def test_sweep_engine_bad_k(
        self, tmp_path: Path, capsys: pytest.CaptureFixture[str]
    ) -> None:
        """k beyond the window size is an error."""
        status = main(["sweep-engine", "--k", "10", "--out", str(tmp_path)])
        assert status == 1
        assert "k=10" in capsys.readouterr().err

    def test_sweep_buffer(
        self,
        toy_files: dict[str, str],
        tmp_path: Path,
        capsys: pytest.CaptureFixture[str],
    ) -> None:
        """One row per depth and the correlation on stdout."""
        out = tmp_path / "buffer"
        status = main(
            [
                "sweep-buffer",
                "--network",
                toy_files["network"],
                "--layer",
                "conv2",
                "--n-i",
                "8",
                "--k",
                "1",
                "--depths",
                "2",
                "8",
                "32",
                "--sparsity-model",
                "iid-bernoulli:0.5",
                "--length",
                "512",
                "--out",
                str(out),
            ]
        )
        assert status == 0
        assert len(_csv_rows(out / SWEEP_BUFFER_NAME)) == 3
        assert "rank correlation" in capsys.readouterr().out

    def test_dse_outputs(self, toy_files: dict[str, str], tmp_path: Path) -> None:
        """dse writes the design, its logs and a manifest."""
        out = tmp_path / "run"
        assert _dse(toy_files, out, "--sparsity-model", "iid-bernoulli:0.5") == 0
        for name in (*DSE_OUTPUTS, MANIFEST_NAME):
            assert (out / name).is_file()

        design = load_design(out / DESIGN_NAME)
        assert design.feasible
        assert design.dsp_total <= 64
        assert load_network(out / NETWORK_NAME) == load_network(toy_files["network"])
        assert json.loads((out / BUDGET_NAME).read_text(encoding="utf-8")) == {
            "dsp": 64,
            "lutram": 8000,
        }
        simulated = _csv_rows(out / SIMULATION_NAME)
        assert [row["layer"] for row in simulated] == ["conv1", "conv2", "conv3"]
        assert len(_csv_rows(out / CONVERGENCE_NAME)) == 60

        manifest = load_manifest(out)
        assert manifest.subcommand is Subcommand.DSE
        assert manifest.seed == 0
        assert manifest.outputs == list(DSE_OUTPUTS)
        assert manifest.options["sparsity_model"] == "iid-bernoulli:0.5"

    def test_dse_from_traces(self, toy_files: dict[str, str], tmp_path: Path) -> None:
        """dse accepts one trace file per layer."""
        traces = tmp_path / "gen"
        main(
            [
                "generate",
                "--network",
                toy_files["network"],
                "--sparsity-model",
                "iid-bernoulli:0.6",
                "--length",
                "256",
                "--out",
                str(traces),
            ]
        )
        paths = sorted(str(p) for p in (traces / "traces").glob("*.sstr"))
        out = tmp_path / "run"
        assert _dse(toy_files, out, "--traces", *paths) == 0
        assert load_manifest(out).inputs["traces"] == paths

    def test_dse_trace_count(
        self, toy_files: dict[str, str], tmp_path: Path, bad_trace: Path
    ) -> None:
        """A trace list that does not match the layers is an error."""
        status = _dse(toy_files, tmp_path / "run", "--traces", str(bad_trace))
        assert status == 1

    def test_dse_infeasible_budget(
        self,
        toy_files: dict[str, str],
        tmp_path: Path,
        capsys: pytest.CaptureFixture[str],
    ) -> None:
        """A budget below the minimal design exits with status 1."""
        budget = tmp_path / "tiny.json"
        budget.write_text(json.dumps({"dsp": 0, "lutram": 8000}), encoding="utf-8")
        files = toy_files | {"budget": str(budget)}
        status = _dse(files, tmp_path / "run", "--sparsity-model", "constant:0.5")
        assert status == 1
        assert "minimal design" in capsys.readouterr().err

    def test_model_and_simulate(
        self, toy_files: dict[str, str], tmp_path: Path
    ) -> None:
        """A saved design can be re-evaluated and re-simulated."""
        run = tmp_path / "run"
        assert _dse(toy_files, run, "--sparsity-model", "iid-bernoulli:0.5") == 0
        design = str(run / DESIGN_NAME)
        common = [
            "--network",
            toy_files["network"],
            "--design",
            design,
            "--sparsity-model",
            "iid-bernoulli:0.5",
        ]

        model_out = tmp_path / "model"
        assert main(["model", *common, "--out", str(model_out)]) == 0
        rows = _csv_rows(model_out / "model.csv")
        expected = load_design(design).latencies
        assert [float(row["latency_cycles"]) for row in rows] == pytest.approx(
            expected, abs=0.05
        )

        sim_out = tmp_path / "sim"
        status = main(
            ["simulate", *common, "--length", "256", "--out", str(sim_out)]
        )
        assert status == 0
        assert len(_csv_rows(sim_out / SIMULATION_NAME)) == 3
        assert load_manifest(sim_out).subcommand is Subcommand.SIMULATE

    def test_report(
        self,
        toy_files: dict[str, str],
        tmp_path: Path,
        capsys: pytest.CaptureFixture[str],
    ) -> None:
        """The report lists every layer and the GOP/s at the given clock."""
        run = tmp_path / "run"
        assert _dse(toy_files, run, "--sparsity-model", "iid-bernoulli:0.5") == 0
        capsys.readouterr()
        assert main(["report", str(run), "--freq-mhz", "200"]) == 0
        out = capsys.readouterr().out
        for name in ("conv1", "conv2", "conv3"):
            assert name in out
        assert "GOP/s at 200 MHz" in out
        assert "GOP/s/DSP" in out

    def test_dse_frequency(
        self,
        toy_files: dict[str, str],
        tmp_path: Path,
        capsys: pytest.CaptureFixture[str],
    ) -> None:
        """--freq-mhz on dse fills report.csv and is reused by report."""
        run = tmp_path / "run"
        status = _dse(
            toy_files,
            run,
            "--sparsity-model",
            "iid-bernoulli:0.5",
            "--freq-mhz",
            "150",
        )
        assert status == 0
        assert load_manifest(run).frequency_mhz == 150.0
        rows = _csv_rows(run / REPORT_NAME)
        layers = [row["layer"] for row in rows]
        assert layers == ["conv1", "conv2", "conv3", NETWORK_ROW]
        assert all(float(row["gops"]) > 0.0 for row in rows)
        assert all(float(row["gops_per_dsp"]) > 0.0 for row in rows)
        network = rows[-1]
        assert float(network["gops"]) == pytest.approx(
            sum(float(row["gops"]) for row in rows[:-1]), rel=1e-3
        )

        capsys.readouterr()
        assert main(["report", str(run)]) == 0
        assert "GOP/s at 150 MHz (manifest)" in capsys.readouterr().out

    def test_report_missing_artifact(
        self,
        toy_files: dict[str, str],
        tmp_path: Path,
        capsys: pytest.CaptureFixture[str],
    ) -> None:
        """A run directory with a deleted artifact is reported by name."""
        run = tmp_path / "run"
        assert _dse(toy_files, run, "--sparsity-model", "iid-bernoulli:0.5") == 0
        (run / SIMULATION_NAME).unlink()
        capsys.readouterr()
        assert main(["report", str(run)]) == 1
        assert SIMULATION_NAME in capsys.readouterr().err

    def test_report_without_manifest(
        self, tmp_path: Path, capsys: pytest.CaptureFixture[str]
    ) -> None:
        """An empty directory is not a run directory."""
        assert main(["report", str(tmp_path)]) == 1
        assert MANIFEST_NAME in capsys.readouterr().err


@pytest.mark.integration
class TestDeterminism:
    """Identical inputs and seeds give identical files."""

    @pytest.mark.parametrize("seed", ["0", "17"])
    def test_dse_byte_identical(
        self, toy_files: dict[str, str], tmp_path: Path, seed: str
    ) -> None:
        """Two dse runs with the same seed write the same bytes."""
        runs = [tmp_path / "a", tmp_path / "b"]
        for run in runs:
            status = _dse(
                toy_files,
                run,
                "--sparsity-model",
                "markov-bursty:0.5:4",
                "--seed",
                seed,
            )
            assert status == 0
        for name in DSE_OUTPUTS:
            assert (runs[0] / name).read_bytes() == (runs[1] / name).read_bytes()

        manifests = [load_manifest(run).to_dict() for run in runs]
        for manifest in manifests:
            manifest.pop("output_dir")
        assert manifests[0] == manifests[1]

    def test_generate_byte_identical(
        self, toy_files: dict[str, str], tmp_path: Path
    ) -> None:
        """Generated trace files repeat byte for byte."""
        runs = [tmp_path / "a", tmp_path / "b"]
        for run in runs:
            main(
                [
                    "generate",
                    "--network",
                    toy_files["network"],
                    "--sparsity-model",
                    "iid-bernoulli:0.4",
                    "--length",
                    "64",
                    "--seed",
                    "3",
                    "--out",
                    str(run),
                ]
            )
        for name in ("conv1", "conv2", "conv3"):
            first = (runs[0] / "traces" / f"{name}.sstr").read_bytes()
            assert first == (runs[1] / "traces" / f"{name}.sstr").read_bytes()

