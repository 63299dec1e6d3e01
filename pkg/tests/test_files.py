import json

import numpy as np
import pytest

from spikemeter.files import (
    WorkloadFileError,
    load_trace,
    load_workload,
    prepare_input,
    save_trace,
    workload_from_dict,
)
from spikemeter.simulate import AnalogTrain, SimulationConfig, SpikeTrain, run_inference

from conftest import simple_model


class TestWorkloadParsing:
    def test_spike_train_file_without_kind_tag(self, tmp_path):
        path = tmp_path / "wl.json"
        path.write_text(json.dumps(
            {"layer": 2, "timesteps": 4, "events": [[0, 0], [1, 2]]}
        ))
        workload = load_workload(path)
        assert workload.kind == "spikes"
        train = prepare_input(workload, SimulationConfig(timesteps=4))
        assert isinstance(train, SpikeTrain)
        assert train.events[0, 0] == 1.0 and train.events[1, 2] == 1.0
        assert train.events.sum() == 2

    def test_rates_inferred_and_encoded_with_seed(self):
        workload = workload_from_dict({"values": [0.0, 1.0]})
        assert workload.kind == "rates"
        train = prepare_input(workload, SimulationConfig(timesteps=6, seed=3))
        assert train.events[0].sum() == 0
        assert train.events[1].sum() == 6

    def test_analog_frames(self):
        workload = workload_from_dict(
            {"kind": "analog", "layer": 2, "timesteps": 2, "frames": [[0.5, 0.0], [0.0, 1.0]]}
        )
        train = prepare_input(workload, SimulationConfig(timesteps=2))
        assert isinstance(train, AnalogTrain)
        assert train.events[0, 0] == 0.5

    def test_timestep_conflict_rejected(self):
        workload = workload_from_dict(
            {"kind": "spikes", "layer": 1, "timesteps": 3, "events": []}
        )
        with pytest.raises(ValueError):
            prepare_input(workload, SimulationConfig(timesteps=4))

    def test_event_outside_dimensions_rejected(self):
        workload = workload_from_dict(
            {"kind": "spikes", "layer": 1, "timesteps": 3, "events": [[1, 0]]}
        )
        with pytest.raises(ValueError):
            prepare_input(workload, SimulationConfig(timesteps=3))

    def test_unrecognizable_shape_rejected(self):
        with pytest.raises(WorkloadFileError):
            workload_from_dict({"something": 1})

    def test_bad_frame_shape_rejected(self):
        workload = workload_from_dict(
            {"kind": "analog", "layer": 2, "timesteps": 3, "frames": [[1.0, 2.0, 3.0]]}
        )
        with pytest.raises(WorkloadFileError):
            prepare_input(workload, SimulationConfig(timesteps=3))


class TestTraceRoundTrip:
    def test_binary_and_analog_layers_survive(self, tmp_path):
        model = simple_model([[0.9, 0.4], [0.3, 0.8]], beta=0.5, threshold=0.7)
        frames = np.array([[0.5, 1.0, 0.0], [1.0, 0.0, 0.25]])
        trace = run_inference(model, AnalogTrain(frames), SimulationConfig(timesteps=3))
        trace.static_metrics = {"parameters": 8.0}
        path = tmp_path / "trace.json"
        save_trace(trace, path)
        again = load_trace(path)
        assert again.equals(trace)
        assert again.timestep_duration == trace.timestep_duration
        assert again.static_metrics == {"parameters": 8.0}
        assert again.model_name == "fixture"

    def test_non_trace_file_rejected(self, tmp_path):
        path = tmp_path / "x.json"
        path.write_text(json.dumps({"format": "something-else"}))
        with pytest.raises(WorkloadFileError):
            load_trace(path)
