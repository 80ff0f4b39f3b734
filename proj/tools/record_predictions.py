"""Record per-epoch argmax predictions during training and write a run file.

Example only; not a supported interface. With Keras:

    recorder = PredictionRecorder(class_names, ids, labels)
    model.fit(x, y, epochs=50, callbacks=[recorder.keras_callback(x)])
    recorder.write("run.json", metadata={"dataset": "cifar10"})

Then `iflow ingest run.json`.
"""

import json


class PredictionRecorder:
    def __init__(self, classes, ids, labels):
        self.classes = list(classes)
        self.ids = [str(i) for i in ids]
        self.labels = [int(l) for l in labels]
        self.epochs = []

    def record(self, predicted):
        predicted = [int(p) for p in predicted]
        if len(predicted) != len(self.ids):
            raise ValueError("expected %d predictions, got %d" % (len(self.ids), len(predicted)))
        self.epochs.append(predicted)

    def keras_callback(self, x, batch_size=512):
        import keras

        recorder = self

        class _Callback(keras.callbacks.Callback):
            def on_epoch_end(self, epoch, logs=None):
                probs = self.model.predict(x, batch_size=batch_size, verbose=0)
                recorder.record(probs.argmax(axis=1))

        return _Callback()

    def document(self, metadata=None):
        return {
            "version": 1,
            "classes": self.classes,
            "epochs": len(self.epochs),
            "metadata": {k: str(v) for k, v in (metadata or {}).items()},
            "instances": [
                {"id": i, "label": self.classes[self.labels[n]], "predictions": [e[n] for e in self.epochs]}
                for n, i in enumerate(self.ids)
            ],
        }

    def write(self, path, metadata=None):
        with open(path, "w") as f:
            json.dump(self.document(metadata), f)
