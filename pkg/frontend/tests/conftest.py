"""Shared fixtures: synthetic artifacts in the simulator's file formats."""

import json

import pytest

CSV_HEADER = ("iter,uav_id,x,y,z,detection,n_particles,ess,"
              "est_x,est_y,est_z,spread,dir_index,step,turned,t_cum,e_cum")


def _row(it, uid, x, y, z, det):
    tail = "100,50.0,50,30,15,20.0,13,1,0,{t},{e}".format(t=12.0 * it,
                                                          e=8.0 * it)
    return f"{it},{uid},{x},{y},{z},{det}," + tail


@pytest.fixture()
def trajectory_csv(tmp_path):
    """Two agents, three iterations, one cue; agent 0's rows arrive out
    of iteration order to exercise reader-side sorting."""
    lines = [
        "# seed = 7",
        "# config_sha256 = " + "ab" * 32,
        "# config: algo = col-inf",
        "# config: source_x = 10.0",
        "# config: source_y = 30.0",
        "# config: source_z = 25.0",
        CSV_HEADER,
        _row(1, 0, 10.0, 10.0, 5.0, 0),
        _row(1, 1, 30.0, 10.0, 5.0, 0),
        _row(3, 0, 10.0, 30.0, 5.0, 0),
        _row(2, 0, 10.0, 20.0, 5.0, 2),
        _row(2, 1, 30.0, 20.0, 5.0, 0),
        _row(3, 1, 30.0, 30.0, 5.0, 0),
    ]
    path = tmp_path / "episode.csv"
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture()
def empty_trajectory_csv(tmp_path):
    lines = [
        "# seed = 0",
        "# config: source_x = 10.0",
        "# config: source_y = 30.0",
        "# config: source_z = 25.0",
        CSV_HEADER,
    ]
    path = tmp_path / "empty.csv"
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture()
def make_batch_summary(tmp_path):
    def build(name, algo, value, mst, sr, runs=50, key="area"):
        doc = {
            "schema": "batch-summary/1",
            "algo": algo,
            "master_seed": 0,
            "run_count": runs,
            "success_count": round(sr * runs),
            "success_rate": sr,
            "mean_search_time": mst,
            "swept": {"key": key, "value": value},
        }
        path = tmp_path / name
        path.write_text(json.dumps(doc))
        return path

    return build


@pytest.fixture()
def make_sweep_summary(tmp_path):
    def build(name, key, rows):
        doc = {"schema": "sweep-summary/1", "swept_key": key,
               "rows": rows}
        path = tmp_path / name
        path.write_text(json.dumps(doc))
        return path

    return build
