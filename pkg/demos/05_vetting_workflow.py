"""A full vetting workflow on a throwaway workspace.

Initializes a project, runs classification + derivation through the same code
path the HTTP service uses, records accept/reject verdicts, and exports the
accepted links. Serve the same workspace interactively with:

    ttl serve --project <dir> --port 8734

Run: python demos/05_vetting_workflow.py
"""

import tempfile

from ttl.project import (
    VetDecision,
    decision_status,
    export_accepted,
    init_project,
    load_project,
    record_decision,
    utc_now,
)
from ttl.service import RunBody, WorkspaceView, execute_run
from ttl.synthetic import random_corpus, random_taxonomy

workdir = tempfile.mkdtemp(prefix="ttl-demo-")
project = init_project(workdir, name="vetting demo")
project.save_taxonomy(random_taxonomy(seed=21, n_nodes=80))
project.save_corpus("source", random_corpus(seed=22, count=12, prefix="B"))
project.save_corpus("target", random_corpus(seed=23, count=12, prefix="G"))

summary = execute_run(WorkspaceView(workdir), RunBody(k=8, lc=2, dim=128))
print("run summary:", summary)

project = load_project(workdir)
candidates = project.current_candidates()
print(f"\n{len(candidates)} candidates await review; vetting the first five:")
for i, c in enumerate(candidates[:5]):
    verdict = "accepted" if i % 2 == 0 else "rejected"
    record_decision(project, VetDecision(
        source_id=c.source_id, target_id=c.target_id, verdict=verdict,
        actor="demo reviewer", timestamp=utc_now(),
    ))
    print(f"  {c.source_id} <-> {c.target_id}: {verdict}")

print("\nlive decision state:")
for pair, state in sorted(decision_status(project).items()):
    print(f"  {pair}: {state['verdict']} (stale={state['stale']})")

exported = export_accepted(project)
print(f"\nexports/accepted.csv ({exported.count(chr(10)) - 1} rows):")
print(exported)
print("workspace kept at:", workdir)
