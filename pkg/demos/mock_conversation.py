"""A full screening conversation against the offline mock backend.

Replays a scripted nine-turn session through the same service object the
HTTP API wraps: age question, one question per symptom topic, then the
assessment with its counterfactual explanation and care recommendations.
Everything is deterministic and needs no network access.

Run:  python3 demos/mock_conversation.py
"""

from ppdstream.checkpoint import checkpoint_from_selector
from ppdstream.dialogue import MockChatBackend
from ppdstream.evaluation import prequential_run
from ppdstream.learners import make_learner
from ppdstream.selection import SelectorConfig
from ppdstream.service import ScreeningService
from ppdstream.synthetic import generate_records

SCRIPT = [
    "I'm 27 years old",
    "I feel like I can't bond with my baby at all, yes it worries me",
    "I often lose focus and struggle to make decisions",
    "Yes, I cry most days",
    "I feel guilty all the time",
    "I snap at my partner constantly",
    "Yes, I have lost my appetite completely",
    "Sometimes I think about harming myself",
    "I barely sleep, I am awake every night",
]


def main():
    stream = generate_records()
    result = prequential_run(stream[:400], make_learner("gnb"), SelectorConfig())
    checkpoint = checkpoint_from_selector("gnb", result.learner, result.selector)
    service = ScreeningService(checkpoint=checkpoint, backend=MockChatBackend())

    session_id, opening = service.create_session()
    for message in opening:
        print(f"[assistant] {message.text}")
    for turn in SCRIPT:
        print(f"[user] {turn}")
        for message in service.post_message(session_id, turn):
            print(f"[{message.role}] {message.text}")
    print()
    print("(the assessment message also carries a structured payload for UIs)")


if __name__ == "__main__":
    main()
