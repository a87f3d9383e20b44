"""Scripted walk through the human-study API.

Starts the study service in-process, completes one session the way the
browser UI would (create session, fetch each group's anonymized rating table,
submit a prediction, read the summary), and prints the outcome against the
reference lines.
"""
import numpy as np
from fastapi.testclient import TestClient

from groupchoice import Strategy, SyntheticSchemeSpec, aggregate, generate_synthetic, pacp_predict
from groupchoice.service import ReferenceAccuracies, create_app

dataset = generate_synthetic(SyntheticSchemeSpec(noise=0.4, seed=5), 8, 10)
app = create_app(
    dataset,
    reference=ReferenceAccuracies(lcp_ave=0.50, pacp_ave=0.44),
    session_log="study_demo.ndjson",
    seed=5,
)
client = TestClient(app)

session = client.post("/api/sessions").json()
print(f"session {session['session_id'][:8]}... with {len(session['tasks'])} tasks")

for i, group_id in enumerate(session["tasks"], start=1):
    view = client.get(f"/api/groups/{group_id}").json()
    table = np.array([m["ratings"] for m in view["members"]], dtype=float)
    # play a PACP-AVE participant: pick the column with the best mean
    profile = aggregate(dataset, dataset.group(group_id), Strategy.AVE)
    pick = pacp_predict(profile, seed=i).predicted_option
    client.post(
        f"/api/sessions/{session['session_id']}/predictions",
        json={"group_id": group_id, "option_index": pick},
    )
    print(
        f"  task {i}/{len(session['tasks'])}: {len(view['members'])} members, "
        f"picked {view['options'][pick]}"
    )

summary = client.get(f"/api/sessions/{session['session_id']}/summary").json()
print()
print(f"answered {summary['answered']}, correct {summary['correct']}, "
      f"accuracy {summary['accuracy']:.3f}")
print(f"references: LCP-AVE {summary['reference']['lcp_ave']}, "
      f"PACP-AVE {summary['reference']['pacp_ave']}, "
      f"human study mean {summary['reference']['human_paper_mean']}")
print()
print("every prediction was appended to study_demo.ndjson; restarting the")
print("service over that log restores the session state.")
