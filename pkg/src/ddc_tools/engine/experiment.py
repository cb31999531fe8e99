"""High-level experiment orchestration used by the CLI and the benchmarks."""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from ddc_tools.core.data import Dataset, generate, load_spec, preset_spec, read_points, write_points
from ddc_tools.core.evaluation import EvalReport, build_report
from ddc_tools.core.exceptions import ConfigurationError, DataIOError
from ddc_tools.core.geometry import write_contours
from ddc_tools.core.local_cluster import Labeling
from ddc_tools.core.validation import validate_output_directory
from ddc_tools.engine.config import NodeParams, RunConfig, node_params_for
from ddc_tools.engine.constants import Artifacts
from ddc_tools.engine.ddc import GlobalModel, assign_points, run_ddc

logger = logging.getLogger(__name__)


@dataclass
class RunOutcome:
    """Everything one run produced."""

    config: RunConfig
    dataset: Dataset
    model: GlobalModel
    assignment: Labeling
    report: EvalReport


def load_dataset(config: RunConfig) -> Dataset:
    """Dataset named by a run config: a point CSV, a spec JSON, or a preset.

    Generated datasets use the config seed.
    """
    if config.dataset:
        path = Path(config.dataset)
        if path.suffix.lower() == ".json":
            return generate(load_spec(path).with_seed(config.seed))
        return read_points(path)
    if config.preset:
        return generate(preset_spec(config.preset, seed=config.seed))
    raise ConfigurationError("No dataset given: pass a preset or a dataset path")


class ExperimentRunner:
    """Run DDC experiments and write their artifacts."""

    def __init__(self, config: RunConfig, dataset: Optional[Dataset] = None):
        """Initialize runner.

        Args:
            config: Resolved run configuration
            dataset: Dataset to use instead of the one named by config
        """
        self.config = config
        self._dataset = dataset

    @property
    def dataset(self) -> Dataset:
        if self._dataset is None:
            self._dataset = load_dataset(self.config)
        return self._dataset

    def node_params(self) -> list[NodeParams]:
        """Per-node parameters; automatic k uses the dataset's ground truth if the config has none."""
        config = self.config
        if config.expected_clusters is None and self.dataset.truth is not None:
            config = config.merged({"expected_clusters": self.dataset.truth.n_clusters})
            self.config = config
        return [node_params_for(config, node_id) for node_id in range(config.n_nodes)]

    def run(self) -> RunOutcome:
        """Execute both DDC phases, assign points and build the report."""
        params = self.node_params()
        config = self.config
        model = run_ddc(
            self.dataset,
            config.topology,
            params,
            config.merge_policy,
            lambda_norm=config.lambda_norm,
            partition_strategy=config.partition,
            seed=config.seed,
            threads=config.threads,
        )
        assignment = assign_points(model, self.dataset)
        report = build_report(self.dataset, model, assignment)
        logger.info(
            "%s: %d global clusters from %d nodes",
            self.dataset.name,
            model.n_clusters,
            config.n_nodes,
        )
        return RunOutcome(config, self.dataset, model, assignment, report)

    def write_artifacts(self, outcome: RunOutcome, out_dir: Path) -> dict[str, Path]:
        """Write contours, assignments, merge trace, report and resolved config.

        Returns:
            Artifact name -> written path

        Raises:
            DataIOError: If the directory or a file cannot be written
        """
        out_dir = validate_output_directory(Path(out_dir))
        paths = {
            "contours": out_dir / Artifacts.CONTOURS,
            "assignments": out_dir / Artifacts.ASSIGNMENTS,
            "merge_trace": out_dir / Artifacts.MERGE_TRACE,
            "report": out_dir / Artifacts.REPORT,
            "resolved_config": out_dir / Artifacts.RESOLVED_CONFIG,
        }
        write_contours(paths["contours"], outcome.model.contours)
        write_points(paths["assignments"], outcome.dataset, outcome.assignment)
        resolved = outcome.config.merged({"out": str(out_dir)})
        try:
            paths["merge_trace"].write_text(
                "".join(json.dumps(r) + "\n" for r in outcome.model.merge_trace_records()),
                encoding="utf-8",
            )
            paths["report"].write_text(outcome.report.to_json() + "\n", encoding="utf-8")
            paths["resolved_config"].write_text(resolved.to_json() + "\n", encoding="utf-8")
        except OSError as e:
            raise DataIOError(f"Failed to write run artifacts to {out_dir}: {e}") from e
        return paths
