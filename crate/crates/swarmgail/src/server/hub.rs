use super::protocol::{ServerMessage, StreamEvent};
use tokio::sync::broadcast::{self, error::RecvError, error::TryRecvError};

/// Fan-out of one session's stream. Each subscriber has a bounded queue;
/// when it falls behind, the oldest events are dropped and it receives a
/// single gap notice with the number of missed events.
#[derive(Clone, Debug)]
pub struct Hub {
    tx: broadcast::Sender<StreamEvent>,
}

impl Hub {
    pub fn new(capacity: usize) -> Self {
        Self { tx: broadcast::channel(capacity.max(1)).0 }
    }

    pub fn publish(&self, events: impl IntoIterator<Item = StreamEvent>) {
        for e in events {
            // no subscribers is fine
            let _ = self.tx.send(e);
        }
    }

    pub fn subscribe(&self) -> Subscription {
        Subscription { rx: self.tx.subscribe() }
    }
}

#[derive(Debug)]
pub struct Subscription {
    rx: broadcast::Receiver<StreamEvent>,
}

impl Subscription {
    /// Next event or gap notice; `None` once the hub is gone.
    pub async fn next(&mut self) -> Option<ServerMessage> {
        match self.rx.recv().await {
            Ok(e) => Some(ServerMessage::Stream(e)),
            Err(RecvError::Lagged(missed)) => Some(ServerMessage::Gap { missed }),
            Err(RecvError::Closed) => None,
        }
    }

    /// Non-blocking variant of [`Subscription::next`].
    pub fn try_next(&mut self) -> Option<ServerMessage> {
        match self.rx.try_recv() {
            Ok(e) => Some(ServerMessage::Stream(e)),
            Err(TryRecvError::Lagged(missed)) => Some(ServerMessage::Gap { missed }),
            Err(TryRecvError::Empty | TryRecvError::Closed) => None,
        }
    }
}
