"""Compile DMN decision models into chat agents and talk to them."""

import json
import os

from . import _dmnbot
from ._dmnbot import Error

__all__ = ["Error", "Agent", "Chat", "validate", "evaluate"]


def _text(dmn):
    if isinstance(dmn, os.PathLike) or (isinstance(dmn, str) and not dmn.lstrip().startswith("<")):
        with open(dmn, encoding="utf-8") as f:
            return f.read()
    return dmn


def validate(dmn):
    """Validation report for a model given as XML text or a file path."""
    return json.loads(_dmnbot.validate(_text(dmn)))


def evaluate(dmn, decision, inputs=None):
    """Evaluate `decision`; returns {"value": ..., "trace": [...]}."""
    return json.loads(_dmnbot.evaluate(_text(dmn), decision, json.dumps(inputs or {})))


class Agent:
    def __init__(self, dmn, customization=None, seed=42, max_phrases=500):
        c = json.dumps(customization) if customization is not None else ""
        self._impl = _dmnbot.Agent.from_text(_text(dmn), c, seed, max_phrases)

    @classmethod
    def load(cls, path):
        agent = cls.__new__(cls)
        agent._impl = _dmnbot.Agent.load(os.fspath(path))
        return agent

    @property
    def intents(self):
        return self._impl.intents

    def manifest(self):
        return json.loads(self._impl.manifest())

    def files(self):
        return self._impl.files()

    def export(self, path):
        return self._impl.export(os.fspath(path))

    def chat(self, session_id=""):
        return Chat(self, session_id)


class Chat:
    def __init__(self, agent, session_id=""):
        self._impl = _dmnbot.Chat(agent._impl, session_id)
        self.welcome = json.loads(self._impl.welcome)

    @property
    def id(self):
        return self._impl.id

    @property
    def status(self):
        return self._impl.status

    @property
    def transcript(self):
        return self._impl.transcript

    def say(self, text):
        return json.loads(self._impl.say(text))

    def context(self):
        return json.loads(self._impl.context())

    def help(self, input=None):
        return self._impl.help(input)
