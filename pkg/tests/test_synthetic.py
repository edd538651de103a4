from glyphbreak.misspell import tokenize_words
from glyphbreak.synthetic import (
    make_chain,
    make_desk_world,
    make_misspelling_dictionary,
    make_vocabulary,
    sample_corpus,
)
from glyphbreak.corpus import Label


def test_vocabulary_composition():
    vocab = make_vocabulary(7, size=200)
    assert len(vocab) == 200
    assert len(set(vocab)) == 200
    with_e = [w for w in vocab if "e" in w]
    with_a = [w for w in vocab if "a" in w]
    with_cc = [w for w in vocab if "cc" in w]
    neutral = [w for w in vocab if not set(w) & set("aecp")]
    assert len(with_e) == 120
    assert len(with_a) == 50
    assert len(with_cc) == 20
    assert len(neutral) == 10
    # Groups do not overlap on attackable letters.
    assert all("a" not in w and "c" not in w for w in with_e)
    assert all("e" not in w and "c" not in w for w in with_a)
    assert not any("p" in w for w in vocab)


def test_vocabulary_deterministic():
    assert make_vocabulary(7) == make_vocabulary(7)
    assert make_vocabulary(7) != make_vocabulary(8)


def test_chain_is_permutation():
    vocab = make_vocabulary(1, size=50)
    chain = make_chain(vocab, 2)
    assert set(chain.successor) == set(vocab)
    assert set(chain.successor.values()) == set(vocab)


def test_sample_corpus_deterministic_and_tokenizable():
    vocab = make_vocabulary(1, size=50)
    chain = make_chain(vocab, 2)
    a = sample_corpus(chain, 5, noise=0.1, seed=3, label=Label.NEURAL, min_words=20, max_words=30)
    b = sample_corpus(chain, 5, noise=0.1, seed=3, label=Label.NEURAL, min_words=20, max_words=30)
    assert a.texts() == b.texts()
    for text in a.texts():
        words = tokenize_words(text)
        assert 20 <= len(words) <= 30
        assert all(s.surface in set(vocab) for s in words)


def test_misspelling_variants_leave_vocabulary():
    vocab = make_vocabulary(1, size=100)
    dictionary = make_misspelling_dictionary(vocab, 5, coverage=0.5)
    vocab_set = set(vocab)
    assert len(dictionary) > 0
    for correct, wrongs in dictionary.reverse_map.items():
        assert correct in vocab_set
        for wrong in wrongs:
            assert wrong not in vocab_set
            assert len(tokenize_words(wrong)) == 1


def test_desk_world_shapes():
    world = make_desk_world(9, vocab_size=80, train_samples=10, calibration_samples=8,
                            neural_eval_samples=12, human_eval_samples=6,
                            min_words=30, max_words=40)
    assert len(world.train) == 10
    assert len(world.neural_calibration) == 8
    assert len(world.human_calibration) == 8
    assert len(world.neural_eval) == 12
    assert len(world.human_eval) == 6
    assert world.train.label is Label.NEURAL
    assert world.human_eval.label is Label.HUMAN
    # Different split names draw different texts.
    assert world.neural_calibration.texts() != world.neural_eval.texts()[:8]
