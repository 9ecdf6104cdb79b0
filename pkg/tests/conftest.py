from __future__ import annotations

import pytest

from ttl.classifier import ArtifactKind, ArtifactRecord
from ttl.taxonomy import Taxonomy, TaxonomyNode, check_taxonomy


@pytest.fixture
def voicecall_taxonomy() -> Taxonomy:
    return check_taxonomy(
        Taxonomy(
            name="voicecall",
            nodes=(
                TaxonomyNode(id="root", title="charging"),
                TaxonomyNode(id="A1", title="voice call", parent="root"),
                TaxonomyNode(id="B1", title="subscriber", parent="root"),
            ),
        )
    )


@pytest.fixture
def voicecall_corpus() -> dict[str, ArtifactRecord]:
    return {
        "R1": ArtifactRecord(
            id="R1",
            kind=ArtifactKind.REQUIREMENT,
            body=(
                "The system shall allow a subscriber to initiate a voice call "
                "to another subscriber by dialing their phone number"
            ),
        ),
        "TC1": ArtifactRecord(
            id="TC1",
            kind=ArtifactKind.TEST_CASE,
            body="Verify successful call setup between two available subscribers",
        ),
        "TC2": ArtifactRecord(
            id="TC2",
            kind=ArtifactKind.TEST_CASE,
            body="Verify call attempt fails when called subscriber is unavailable",
        ),
    }
