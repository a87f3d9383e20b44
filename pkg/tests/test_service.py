import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from groupchoice.aggregation import Strategy, aggregate
from groupchoice.dataset import Dataset, Group, RatingMatrix, SyntheticSchemeSpec, generate_synthetic, square_ratings
from groupchoice.prediction import pacp_predict
from groupchoice.service import (
    HUMAN_PAPER_MEAN_ACCURACY,
    ReferenceAccuracies,
    create_app,
    score_log,
)


@pytest.fixture
def three_group_dataset():
    return generate_synthetic(SyntheticSchemeSpec(noise=0.0, seed=201), 3, 5)


@pytest.fixture
def client(three_group_dataset, tmp_path):
    app = create_app(
        three_group_dataset,
        reference=ReferenceAccuracies(lcp_ave=0.5, pacp_ave=0.42),
        session_log=tmp_path / "sessions.ndjson",
        seed=7,
    )
    return TestClient(app)


def start_session(client):
    response = client.post("/api/sessions")
    assert response.status_code == 201
    return response.json()


class TestSessionFlow:
    def test_session_lists_all_groups_shuffled(self, client, three_group_dataset):
        session = start_session(client)
        assert sorted(session["tasks"]) == sorted(
            g.group_id for g in three_group_dataset.groups
        )

    def test_sessions_are_independent(self, client):
        a = start_session(client)
        b = start_session(client)
        assert a["session_id"] != b["session_id"]

    def test_complete_session_with_true_choices(self, client, three_group_dataset):
        session = start_session(client)
        for gid in session["tasks"]:
            response = client.post(
                f"/api/sessions/{session['session_id']}/predictions",
                json={"group_id": gid, "option_index": three_group_dataset.choice(gid)},
            )
            assert response.status_code == 201
        summary = client.get(f"/api/sessions/{session['session_id']}/summary").json()
        assert summary["answered"] == 3
        assert summary["correct"] == 3
        assert summary["accuracy"] == 1.0
        assert summary["reference"]["human_paper_mean"] == HUMAN_PAPER_MEAN_ACCURACY
        assert summary["reference"]["lcp_ave"] == 0.5
        assert summary["reference"]["pacp_ave"] == 0.42
        assert summary["elapsed_seconds"] >= 0.0

    def test_double_submission_conflicts(self, client):
        session = start_session(client)
        gid = session["tasks"][0]
        url = f"/api/sessions/{session['session_id']}/predictions"
        assert client.post(url, json={"group_id": gid, "option_index": 0}).status_code == 201
        assert client.post(url, json={"group_id": gid, "option_index": 1}).status_code == 409

    def test_unknown_session_is_404(self, client):
        assert client.get("/api/sessions/nope/summary").status_code == 404
        assert (
            client.post(
                "/api/sessions/nope/predictions",
                json={"group_id": "g1", "option_index": 0},
            ).status_code
            == 404
        )

    def test_bad_prediction_payloads(self, client):
        session = start_session(client)
        url = f"/api/sessions/{session['session_id']}/predictions"
        assert client.post(url, json={"group_id": "missing", "option_index": 0}).status_code == 400
        assert client.post(url, json={"group_id": session["tasks"][0], "option_index": 99}).status_code == 400

    def test_pacp_scripted_predictions_match_pacp_accuracy(
        self, client, three_group_dataset
    ):
        session = start_session(client)
        correct = 0
        for i, gid in enumerate(session["tasks"]):
            profile = aggregate(
                three_group_dataset, three_group_dataset.group(gid), Strategy.AVE
            )
            option = pacp_predict(profile, seed=i).predicted_option
            correct += int(option == three_group_dataset.choice(gid))
            client.post(
                f"/api/sessions/{session['session_id']}/predictions",
                json={"group_id": gid, "option_index": option},
            )
        summary = client.get(f"/api/sessions/{session['session_id']}/summary").json()
        assert summary["accuracy"] == correct / 3


class TestGroupView:
    def test_serves_raw_ratings_with_anonymous_labels(self, three_group_dataset, tmp_path):
        squared = three_group_dataset.with_ratings(
            square_ratings(three_group_dataset.ratings)
        )
        app = create_app(three_group_dataset, session_log=None)
        client = TestClient(app)
        gid = three_group_dataset.groups[0].group_id
        payload = client.get(f"/api/groups/{gid}").json()
        assert payload["options"] == [f"D{j}" for j in range(1, 6)]
        group = three_group_dataset.group(gid)
        assert [m["label"] for m in payload["members"]] == [
            f"Member {i}" for i in range(1, len(group) + 1)
        ]
        for member, user in zip(payload["members"], group.members):
            assert member["ratings"] == list(three_group_dataset.ratings.values[user])
        # the response never leaks the actual group choice
        assert "choice" not in json.dumps(payload)

    def test_unknown_rating_serialized_as_null(self, tmp_path):
        values = np.array([[5.0, np.nan], [2.0, 8.0]])
        ds = Dataset(RatingMatrix(values), (Group("g1", (0, 1)),), {"g1": 0})
        client = TestClient(create_app(ds))
        payload = client.get("/api/groups/g1").json()
        assert payload["members"][0]["ratings"] == [5.0, None]

    def test_unknown_group_404(self, client):
        assert client.get("/api/groups/absent").status_code == 404


class TestPersistence:
    def test_log_replay_restores_sessions(self, three_group_dataset, tmp_path):
        log = tmp_path / "log.ndjson"
        app = create_app(three_group_dataset, session_log=log, seed=3)
        client = TestClient(app)
        session = start_session(client)
        gid = session["tasks"][0]
        option = three_group_dataset.choice(gid)
        client.post(
            f"/api/sessions/{session['session_id']}/predictions",
            json={"group_id": gid, "option_index": option},
        )

        # a fresh app over the same log resumes the session mid-way
        resumed = TestClient(create_app(three_group_dataset, session_log=log, seed=3))
        summary = resumed.get(f"/api/sessions/{session['session_id']}/summary").json()
        assert summary["answered"] == 1
        assert summary["correct"] == 1
        conflict = resumed.post(
            f"/api/sessions/{session['session_id']}/predictions",
            json={"group_id": gid, "option_index": option},
        )
        assert conflict.status_code == 409

    def test_log_scoring_matches_summary(self, three_group_dataset, tmp_path):
        log = tmp_path / "log.ndjson"
        client = TestClient(create_app(three_group_dataset, session_log=log, seed=4))
        session = start_session(client)
        for gid in session["tasks"]:
            client.post(
                f"/api/sessions/{session['session_id']}/predictions",
                json={"group_id": gid, "option_index": 0},
            )
        summary = client.get(f"/api/sessions/{session['session_id']}/summary").json()
        scored = score_log(log, three_group_dataset)
        assert scored[session["session_id"]] == summary["accuracy"]


class TestReferenceLoading:
    def test_from_report_json(self, tmp_path):
        report = {
            "variants": [
                {"model": "LCP", "strategy": "AVE", "augmentation": "none", "mean_accuracy": 0.49},
                {"model": "PACP", "strategy": "AVE", "augmentation": "none", "mean_accuracy": 0.44},
                {"model": "LCP", "strategy": "AVE", "augmentation": "P", "mean_accuracy": 0.51},
            ]
        }
        path = tmp_path / "report.json"
        path.write_text(json.dumps(report))
        reference = ReferenceAccuracies.from_report_json(path)
        assert reference.lcp_ave == 0.49
        assert reference.pacp_ave == 0.44
